#include "slantmap/check_result.hpp"

#include <cmath>

namespace slantmap {

const char* to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::Pass: return "pass";
    case CheckStatus::Fail: return "fail";
    case CheckStatus::Skipped: return "skipped";
  }
  return "unknown";
}

std::optional<double> CheckResult::value(const std::string& key) const {
  for (const auto& [k, v] : values)
    if (k == key) return v;
  return std::nullopt;
}

const CheckResult* CheckResult::part(const std::string& part_name) const {
  for (const auto& p : parts)
    if (p.name == part_name) return &p;
  return nullptr;
}

CheckResult CheckResult::skip(std::string name, std::string reason) {
  CheckResult r;
  r.name = std::move(name);
  r.status = CheckStatus::Skipped;
  r.reason = std::move(reason);
  return r;
}

void MaxResidual::observe(double r, const Eigen::VectorXd& point,
                          std::vector<std::pair<std::string, Eigen::VectorXd>> vectors) {
  ++samples_;
  // NaN counts as the worst possible residual.
  if (std::isnan(r)) r = INFINITY;
  if (!witness_ || r > max_) {
    max_ = r;
    witness_ = Witness{point, std::move(vectors)};
  }
}

CheckResult MaxResidual::finish(std::string name, double tol) const {
  CheckResult c;
  c.name = std::move(name);
  c.residual = max_;
  c.tol = tol;
  c.samples = samples_;
  c.status = max_ <= tol ? CheckStatus::Pass : CheckStatus::Fail;
  if (c.failed()) c.witness = witness_;
  return c;
}

}  // namespace slantmap
