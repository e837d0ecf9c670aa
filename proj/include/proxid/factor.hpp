#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace proxid {

struct Var {
  std::string name;
  int card = 2;
  friend bool operator==(const Var&, const Var&) = default;
};

class Factor;

// Elementwise a / b on the union scope. Throws PositivityViolation where
// |b| < min_denominator.
Factor divide(const Factor& a, const Factor& b, double min_denominator = 1e-12);

// Dense nonnegative table over the joint states of a set of discrete
// variables. Variables are kept sorted by name; values are row-major with the
// last variable varying fastest. A factor over no variables is a scalar.
class Factor {
 public:
  static constexpr double kMaxStates = 1e7;

  Factor() : values_{1.0} {}
  // `values` is laid out in the order of `vars` as given; it is permuted into
  // canonical order.
  Factor(std::vector<Var> vars, std::vector<double> values);

  static Factor constant(std::vector<Var> vars, double value);

  const std::vector<Var>& vars() const { return vars_; }
  std::vector<std::string> names() const;
  bool has(const std::string& name) const;
  int card(const std::string& name) const;
  std::size_t size() const { return values_.size(); }
  const std::vector<double>& values() const { return values_; }
  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }

  // Value at a full assignment (extra names are ignored).
  double at(const std::map<std::string, int>& assignment) const;
  std::map<std::string, int> assignment(std::size_t index) const;

  double sum() const;
  Factor marginal(const std::vector<std::string>& keep) const;
  Factor sum_out(const std::vector<std::string>& drop) const;
  // Fixes some variables to given states and drops them from the scope.
  Factor slice(const std::map<std::string, int>& assignment) const;
  Factor relabel(const std::map<std::string, std::string>& renames) const;
  Factor broadcast(const std::vector<Var>& extra) const;
  Factor map(const std::function<double(double)>& f) const;

  friend Factor operator*(const Factor& a, const Factor& b);
  friend Factor divide(const Factor& a, const Factor& b, double min_denominator);

  // Largest absolute entrywise difference; both factors must share a scope.
  friend double max_abs_diff(const Factor& a, const Factor& b);

 private:
  std::vector<Var> vars_;
  std::vector<double> values_;
};

using JointTable = Factor;

// Union of two sorted variable lists; cardinalities must agree.
std::vector<Var> merge_vars(const std::vector<Var>& a, const std::vector<Var>& b);

// Calls f(index, states) for every joint state of `vars` in row-major order.
void for_each_state(const std::vector<Var>& vars,
                    const std::function<void(std::size_t, const std::vector<int>&)>& f);

// Formats a joint state as "A=0,Y=1".
std::string format_state(const std::vector<Var>& vars, const std::vector<int>& states);

}  // namespace proxid
