#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace slantmap {

enum class CheckStatus { Pass, Fail, Skipped };

const char* to_string(CheckStatus s);

/// Where the worst residual of a check was observed.
struct Witness {
  Eigen::VectorXd point;
  std::vector<std::pair<std::string, Eigen::VectorXd>> vectors;
};

struct CheckResult {
  std::string name;
  CheckStatus status = CheckStatus::Skipped;
  double residual = 0.0;
  double tol = 0.0;
  int samples = 0;
  std::string reason;
  std::optional<Witness> witness;
  /// Named auxiliary scalars (fitted constants, secondary residuals).
  std::vector<std::pair<std::string, double>> values;
  /// Sub-checks that make up this one.
  std::vector<CheckResult> parts;

  bool passed() const { return status == CheckStatus::Pass; }
  bool failed() const { return status == CheckStatus::Fail; }
  bool skipped() const { return status == CheckStatus::Skipped; }

  std::optional<double> value(const std::string& key) const;
  const CheckResult* part(const std::string& part_name) const;

  static CheckResult skip(std::string name, std::string reason);
};

/// Running maximum of a residual that remembers where it happened.
class MaxResidual {
 public:
  void observe(double r, const Eigen::VectorXd& point,
               std::vector<std::pair<std::string, Eigen::VectorXd>> vectors = {});
  double value() const { return max_; }
  int samples() const { return samples_; }
  const std::optional<Witness>& witness() const { return witness_; }

  /// Fills residual, samples, witness and pass/fail against tol.
  CheckResult finish(std::string name, double tol) const;

 private:
  double max_ = 0.0;
  int samples_ = 0;
  std::optional<Witness> witness_;
};

}  // namespace slantmap
