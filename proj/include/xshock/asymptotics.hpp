// Closed-form expansion coefficients at N-, polynomial extraction of the same
// coefficients from runs, and the comparison report.
#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "xshock/scenario.hpp"
#include "xshock/shock_solver.hpp"

namespace xs {

// Named scalars, kept in insertion order for stable output.
class CoefficientTable {
 public:
  void set(const std::string& name, double value);
  double at(const std::string& name) const;
  bool has(const std::string& name) const { return index_.count(name) != 0; }
  const std::vector<std::pair<std::string, double>>& entries() const { return entries_; }

 private:
  std::vector<std::pair<std::string, double>> entries_;
  std::map<std::string, std::size_t> index_;
};

// Every coefficient by direct substitution.  Pure: equal inputs give equal tables.
CoefficientTable closed_form_suite(const NullPointInvariants& inv);

struct ConditioningError : std::runtime_error {
  ConditioningError(const std::string& what, double suggested_window)
      : std::runtime_error(what), suggested_window(suggested_window) {}
  double suggested_window;
};

struct WindowPolicy {
  double window = 0;     // largest window [0, window]; 0 means all samples
  int levels = 3;        // nested windows window, window/2, ...
  double min_tau = 0;    // samples below are dropped (start-up transients)
  int extrapolate = -1;  // Richardson order; < 0 means from the model
};

struct FitResult {
  std::vector<int> powers;
  std::vector<double> coef, error;  // extrapolated coefficients and error bars
  std::vector<double> windows;
  std::vector<std::vector<double>> per_window;  // coefficients per window
  int extrapolation_order = 0;
  double coefficient(int power) const;
  double error_of(int power) const;
};

// Least squares on monomials tau^p over nested shrinking windows, each
// coefficient Richardson-extrapolated to zero window.  Every window needs at
// least three samples per coefficient.
FitResult fit_series(const std::vector<double>& tau, const std::vector<double>& value,
                     const std::vector<int>& powers, const WindowPolicy& policy = {});

struct Comparison {
  std::string name;
  double fitted = 0, closed = 0, deviation = 0, tolerance = 0, error = 0;
  bool pass = false;
};

struct ValidationReport {
  bool shock_case = true;
  std::string label;  // "expansion-shock" or "non-shock"
  std::vector<Comparison> entries;
  bool all_pass() const;
  const Comparison& get(const std::string& name) const;
};

struct RunOutputs {
  const ShockCurve* curve = nullptr;
  const std::vector<NullCurveSample>* c_minus = nullptr;  // optional
};

struct ValidationOptions {
  double slope_tol = 0.02, quadratic_tol = 0.10, quintic_tol = 0.20;
  double edge_slope_tol = 0.05, limit_tol = 0.05;
  double window_fraction = 1.0;  // fit window as a fraction of the run length
  double min_tau_fraction = 0.1;
  // Near the corner the march error dominates the truncation error, so the
  // default uses the widest window without extrapolation.
  int levels = 2;
  int extrapolate = 0;
};

ValidationReport validate_run(const RunOutputs& run, const CoefficientTable& table,
                              const ValidationOptions& opt = {});

}  // namespace xs
