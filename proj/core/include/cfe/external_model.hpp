#pragma once

#include <memory>
#include <string>

#include "cfe/models.hpp"

namespace cfe {

// Adapter that turns any executable into a PredictiveModel. The command is
// spawned once (via /bin/sh -c) and spoken to over a line protocol: each
// prediction writes one line of row-major sample cells separated by single
// spaces, and reads back one line holding one real. Spawn failures,
// timeouts, early exits and non-numeric replies surface as ModelError.
// Calls are serialized internally, so the model is safe to share between
// search workers.
class ExternalCommandModel : public PredictiveModel {
 public:
  explicit ExternalCommandModel(std::string command, int timeout_ms = 10000);
  ~ExternalCommandModel() override;

  ExternalCommandModel(const ExternalCommandModel&) = delete;
  ExternalCommandModel& operator=(const ExternalCommandModel&) = delete;

  double predict(const SeriesSample& sample) const override;

  const std::string& command() const { return command_; }

 private:
  struct Process;

  std::string command_;
  int timeout_ms_;
  std::unique_ptr<Process> process_;
};

}  // namespace cfe
