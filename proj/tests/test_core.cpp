#include <doctest.h>

#include "cfe/constraints.hpp"
#include "cfe/distance.hpp"
#include "cfe/errors.hpp"
#include "cfe/rng.hpp"
#include "cfe/series.hpp"
#include "oracles.hpp"

using namespace cfe;

namespace {

FeatureSchema continuous_schema(int width, std::vector<double> weights = {}) {
  std::vector<FeatureSpec> features;
  for (int d = 0; d < width; ++d) {
    FeatureSpec f;
    f.name = "f_" + std::to_string(d);
    if (!weights.empty()) f.feasibility_weight = weights[static_cast<size_t>(d)];
    features.push_back(std::move(f));
  }
  return FeatureSchema(std::move(features));
}

SeriesSample sample_of(std::initializer_list<std::initializer_list<double>> rows) {
  const int K = static_cast<int>(rows.size());
  const int D = static_cast<int>(rows.begin()->size());
  Eigen::MatrixXd values(K, D);
  int k = 0;
  for (const auto& row : rows) {
    int d = 0;
    for (double v : row) values(k, d++) = v;
    ++k;
  }
  return SeriesSample(std::move(values));
}

SeriesSample random_sample(Rng& rng, int K, int D) {
  Eigen::MatrixXd values(K, D);
  for (int k = 0; k < K; ++k) {
    for (int d = 0; d < D; ++d) values(k, d) = rng.normal();
  }
  return SeriesSample(std::move(values));
}

}  // namespace

TEST_CASE("proximity: identical samples are at distance zero") {
  Rng rng(1);
  const SeriesSample sample = random_sample(rng, 4, 3);
  const FeatureSchema schema = continuous_schema(3, {0.5, 2.0, 7.0});
  CHECK(proximity(sample, sample, schema) == 0.0);
}

TEST_CASE("proximity: continuous L1 case") {
  const FeatureSchema schema = continuous_schema(2);
  const SeriesSample original = sample_of({{0, 0}, {0, 0}});
  const SeriesSample candidate = sample_of({{1, 0}, {2, 0}});
  CHECK(proximity(original, candidate, schema) == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("proximity: discrete mismatch counting with weight") {
  FeatureSpec f;
  f.name = "cat";
  f.kind = FeatureKind::discrete;
  f.cardinality = 2;
  f.feasibility_weight = 0.5;
  const FeatureSchema schema({f});
  const SeriesSample original = sample_of({{0}, {0}});
  const SeriesSample candidate = sample_of({{1}, {0}});
  CHECK(proximity(original, candidate, schema) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("proximity: shape mismatch raises a dimension error") {
  const FeatureSchema schema = continuous_schema(2);
  const SeriesSample a = sample_of({{0, 0}});
  const SeriesSample b = sample_of({{0, 0}, {0, 0}});
  CHECK_THROWS_AS(proximity(a, b, schema), DimensionError);
}

TEST_CASE("proximity: matches the scalar-loop oracle on random pairs") {
  Rng rng(42);
  for (int round = 0; round < 300; ++round) {
    const int K = 1 + static_cast<int>(rng.uniform() * 10);
    const int D = 1 + static_cast<int>(rng.uniform() * 6);
    std::vector<FeatureSpec> features;
    for (int d = 0; d < D; ++d) {
      FeatureSpec f;
      f.name = "f_" + std::to_string(d);
      f.feasibility_weight = 0.1 + rng.uniform() * 5.0;
      if (rng.uniform() < 0.3) {
        f.kind = FeatureKind::discrete;
        f.cardinality = 4;
      }
      features.push_back(std::move(f));
    }
    const FeatureSchema schema(std::move(features));
    SeriesSample a = random_sample(rng, K, D);
    SeriesSample b = random_sample(rng, K, D);
    for (int d = 0; d < D; ++d) {
      if (!schema.is_discrete(d)) continue;
      for (int k = 0; k < K; ++k) {
        a.values(k, d) = std::floor(rng.uniform() * 4);
        b.values(k, d) = std::floor(rng.uniform() * 4);
      }
    }
    const double got = proximity(a, b, schema);
    const double want = oracles::proximity(a, b, schema);
    CHECK(got == doctest::Approx(want).epsilon(1e-9));

    const int got_sparsity = sparsity(a, b);
    CHECK(got_sparsity == oracles::sparsity(a, b, kSparsityTolerance));
    CHECK(got_sparsity <= K * D);
  }
}

TEST_CASE("proximity: scales linearly in the feasibility weights") {
  Rng rng(7);
  const SeriesSample a = random_sample(rng, 5, 4);
  const SeriesSample b = random_sample(rng, 5, 4);
  const FeatureSchema ones = continuous_schema(4, {1, 1, 1, 1});
  const FeatureSchema twos = continuous_schema(4, {2, 2, 2, 2});
  CHECK(proximity(a, b, twos) ==
        doctest::Approx(2.0 * proximity(a, b, ones)).epsilon(1e-12));
}

TEST_CASE("sparsity: identity, single-cell and full-replacement cases") {
  const FeatureSchema schema = continuous_schema(4);
  Rng rng(3);
  const SeriesSample original = random_sample(rng, 65, 4);

  CHECK(sparsity(original, original) == 0);

  SeriesSample one_cell = original;
  one_cell.values(10, 2) += 1.0;
  CHECK(sparsity(original, one_cell, 1e-12) == 1);

  SeriesSample replaced = original;
  replaced.values.array() += 5.0;  // full substitution of a K=65, D=4 sample
  CHECK(sparsity(original, replaced) == 260);
}

TEST_CASE("constraints: empty set leaves the candidate untouched") {
  Rng rng(11);
  const FeatureSchema schema = continuous_schema(3);
  const SeriesSample original = random_sample(rng, 4, 3);
  const SeriesSample candidate = random_sample(rng, 4, 3);
  CHECK(apply_constraints(candidate, original, ConstraintSet(), schema) == candidate);
}

TEST_CASE("constraints: immutable features are restored everywhere") {
  std::vector<FeatureSpec> features(3);
  features[0] = {"locked", FeatureKind::continuous, Mutability::immutable, 1.0, 0, {}};
  features[1] = {"free", FeatureKind::continuous, Mutability::actionable, 1.0, 0, {}};
  features[2] = {"also_free", FeatureKind::continuous, Mutability::actionable, 1.0, 0, {}};
  const FeatureSchema schema(std::move(features));

  Rng rng(12);
  const SeriesSample original = random_sample(rng, 6, 3);
  SeriesSample candidate = random_sample(rng, 6, 3);
  const SeriesSample constrained =
      apply_constraints(candidate, original, ConstraintSet(), schema);
  CHECK(constrained.values.col(0) == original.values.col(0));
  CHECK(constrained.values.col(1) == candidate.values.col(1));
}

TEST_CASE("constraints: range rule clamps a runaway cell") {
  const FeatureSchema schema = continuous_schema(2);
  const ConstraintSet constraints({{1, -1.0, 1.0}}, {});
  const SeriesSample original = sample_of({{0, 0}, {0, 0}});
  const SeriesSample candidate = sample_of({{0, 2.0}, {0, -3.0}});
  const SeriesSample constrained =
      apply_constraints(candidate, original, constraints, schema);
  CHECK(constrained.values(0, 1) == 1.0);
  CHECK(constrained.values(1, 1) == -1.0);
}

TEST_CASE("constraints: causal set rule rewrites the affected suffix") {
  const FeatureSchema schema = continuous_schema(2);
  CausalRule rule;
  rule.trigger_feature = 0;
  rule.affected_feature = 1;
  rule.mode = CausalRule::Mode::set;
  rule.value = 9.0;
  const ConstraintSet constraints({}, {rule});

  const SeriesSample original = sample_of({{0, 1}, {0, 2}, {0, 3}});
  SeriesSample candidate = original;
  candidate.values(1, 0) = 5.0;  // feature 0 changes at step 1
  const SeriesSample constrained =
      apply_constraints(candidate, original, constraints, schema);
  CHECK(constrained.values(0, 1) == 1.0);   // untouched before the trigger
  CHECK(constrained.values(1, 1) == 9.0);
  CHECK(constrained.values(2, 1) == 9.0);
}

TEST_CASE("constraints: causal linear rule uses the trigger-step value") {
  const FeatureSchema schema = continuous_schema(2);
  CausalRule rule;
  rule.trigger_feature = 0;
  rule.affected_feature = 1;
  rule.mode = CausalRule::Mode::linear;
  rule.alpha = 2.0;
  rule.offset = 1.0;
  const ConstraintSet constraints({}, {rule});

  const SeriesSample original = sample_of({{0, 0}, {0, 0}});
  SeriesSample candidate = original;
  candidate.values(0, 0) = 3.0;
  const SeriesSample constrained =
      apply_constraints(candidate, original, constraints, schema);
  CHECK(constrained.values(0, 1) == 7.0);  // 2 * 3 + 1
  CHECK(constrained.values(1, 1) == 7.0);
}

TEST_CASE("constraints: self-triggering causal rules are rejected") {
  CausalRule rule;
  rule.trigger_feature = 2;
  rule.affected_feature = 2;
  CHECK_THROWS_AS(ConstraintSet({}, {rule}), ConfigError);
}

TEST_CASE("constraints: application is idempotent on random inputs") {
  Rng rng(99);
  for (int round = 0; round < 100; ++round) {
    const int K = 2 + static_cast<int>(rng.uniform() * 6);
    const int D = 3 + static_cast<int>(rng.uniform() * 4);
    std::vector<FeatureSpec> features;
    for (int d = 0; d < D; ++d) {
      FeatureSpec f;
      f.name = "f_" + std::to_string(d);
      if (d == 0 && rng.uniform() < 0.5) f.mutability = Mutability::immutable;
      features.push_back(std::move(f));
    }
    FeatureSchema schema;
    try {
      schema = FeatureSchema(std::move(features));
    } catch (const SchemaError&) {
      continue;  // all-immutable draw
    }

    std::vector<RangeRule> range_rules;
    if (rng.uniform() < 0.7) {
      range_rules.push_back({1 + static_cast<int>(rng.uniform() * (D - 1)), -0.5, 0.5});
    }
    std::vector<CausalRule> causal_rules;
    if (rng.uniform() < 0.7) {
      CausalRule rule;
      rule.trigger_feature = 1;
      rule.affected_feature = 2;
      if (rng.uniform() < 0.5) {
        rule.mode = CausalRule::Mode::set;
        rule.value = rng.normal();
      } else {
        rule.mode = CausalRule::Mode::linear;
        rule.alpha = rng.normal();
        rule.offset = rng.normal();
      }
      causal_rules.push_back(rule);
    }
    const ConstraintSet constraints(std::move(range_rules), std::move(causal_rules));

    const SeriesSample original = random_sample(rng, K, D);
    const SeriesSample candidate = random_sample(rng, K, D);
    const SeriesSample once = apply_constraints(candidate, original, constraints, schema);
    const SeriesSample twice = apply_constraints(once, original, constraints, schema);
    CHECK(once == twice);
    for (int d = 0; d < D; ++d) {
      if (schema.is_immutable(d)) {
        CHECK(once.values.col(d) == original.values.col(d));
      }
    }
  }
}

TEST_CASE("schema: invariants are enforced") {
  CHECK_THROWS_AS(FeatureSchema(std::vector<FeatureSpec>{}), SchemaError);

  FeatureSpec bad_weight;
  bad_weight.name = "w";
  bad_weight.feasibility_weight = 0.0;
  CHECK_THROWS_AS(FeatureSchema({bad_weight}), SchemaError);

  FeatureSpec no_actionable;
  no_actionable.name = "locked";
  no_actionable.mutability = Mutability::immutable;
  CHECK_THROWS_AS(FeatureSchema({no_actionable}), SchemaError);

  FeatureSpec discrete;
  discrete.name = "cat";
  discrete.kind = FeatureKind::discrete;
  discrete.cardinality = 0;
  CHECK_THROWS_AS(FeatureSchema({discrete}), SchemaError);
}

TEST_CASE("schema: discrete cells are validated against cardinality") {
  FeatureSpec f;
  f.name = "cat";
  f.kind = FeatureKind::discrete;
  f.cardinality = 2;
  const FeatureSchema schema({f});
  CHECK_NOTHROW(validate_sample(sample_of({{0}, {1}}), schema));
  CHECK_THROWS_AS(validate_sample(sample_of({{0}, {5}}), schema), SchemaError);
  CHECK_THROWS_AS(validate_sample(sample_of({{0.5}, {1}}), schema), SchemaError);
}

TEST_CASE("target: classification and regression predicates") {
  const TargetSpec cls = TargetSpec::for_class(2);
  CHECK(cls.satisfied(2.0));
  CHECK_FALSE(cls.satisfied(1.0));

  const TargetSpec reg = TargetSpec::for_range(-0.5, 0.5);
  CHECK(reg.satisfied(0.0));
  CHECK(reg.satisfied(0.5));
  CHECK_FALSE(reg.satisfied(0.500001));
  CHECK_THROWS_AS(TargetSpec::for_range(1.0, 0.0), ConfigError);
}
