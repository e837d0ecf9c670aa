#include "proxid/factor.hpp"

#include <algorithm>
#include <cmath>

#include "proxid/errors.hpp"

namespace proxid {

namespace {

std::size_t checked_size(const std::vector<Var>& vars) {
  double n = 1;
  for (auto& v : vars) {
    if (v.card < 1) throw Error("variable '" + v.name + "' has no states");
    n *= v.card;
  }
  if (n > Factor::kMaxStates)
    throw StateSpaceOverflow("table over " + std::to_string(vars.size()) +
                             " variables exceeds the state budget");
  return static_cast<std::size_t>(n);
}

std::vector<std::size_t> row_major_strides(const std::vector<Var>& vars) {
  std::vector<std::size_t> s(vars.size());
  std::size_t acc = 1;
  for (std::size_t i = vars.size(); i-- > 0;) {
    s[i] = acc;
    acc *= vars[i].card;
  }
  return s;
}

// Stride of each of `walk`'s variables inside a table laid out over `layout`
// (0 when the table does not carry that variable).
std::vector<std::size_t> strides_within(const std::vector<Var>& walk,
                                        const std::vector<Var>& layout) {
  auto ls = row_major_strides(layout);
  std::vector<std::size_t> out(walk.size(), 0);
  for (std::size_t i = 0; i < walk.size(); ++i)
    for (std::size_t j = 0; j < layout.size(); ++j)
      if (layout[j].name == walk[i].name) out[i] = ls[j];
  return out;
}

// Odometer over the joint states of `vars` that keeps one running offset per
// attached table.
class Walker {
 public:
  Walker(const std::vector<Var>& vars, std::vector<std::vector<std::size_t>> strides)
      : state_(vars.size(), 0), strides_(std::move(strides)), offs_(strides_.size(), 0) {
    for (auto& v : vars) cards_.push_back(v.card);
  }
  std::size_t offset(std::size_t k) const { return offs_[k]; }
  const std::vector<int>& state() const { return state_; }
  bool next() {
    for (std::size_t i = cards_.size(); i-- > 0;) {
      if (++state_[i] < cards_[i]) {
        for (std::size_t k = 0; k < offs_.size(); ++k) offs_[k] += strides_[k][i];
        return true;
      }
      for (std::size_t k = 0; k < offs_.size(); ++k)
        offs_[k] -= strides_[k][i] * static_cast<std::size_t>(cards_[i] - 1);
      state_[i] = 0;
    }
    return false;
  }

 private:
  std::vector<int> cards_;
  std::vector<int> state_;
  std::vector<std::vector<std::size_t>> strides_;
  std::vector<std::size_t> offs_;
};

std::vector<Var> sorted_vars(std::vector<Var> vars) {
  std::sort(vars.begin(), vars.end(),
            [](const Var& a, const Var& b) { return a.name < b.name; });
  for (std::size_t i = 1; i < vars.size(); ++i)
    if (vars[i].name == vars[i - 1].name)
      throw Error("duplicate variable '" + vars[i].name + "' in table");
  return vars;
}

}  // namespace

Factor::Factor(std::vector<Var> vars, std::vector<double> values) {
  std::size_t n = checked_size(vars);
  if (values.size() != n)
    throw Error("table has " + std::to_string(values.size()) + " entries, expected " +
                std::to_string(n));
  vars_ = sorted_vars(vars);
  if (vars_ == vars) {
    values_ = std::move(values);
    return;
  }
  values_.assign(n, 0.0);
  Walker w(vars, {strides_within(vars, vars_)});
  std::size_t i = 0;
  do {
    values_[w.offset(0)] = values[i++];
  } while (w.next());
}

Factor Factor::constant(std::vector<Var> vars, double value) {
  std::size_t n = checked_size(vars);
  return Factor(std::move(vars), std::vector<double>(n, value));
}

std::vector<std::string> Factor::names() const {
  std::vector<std::string> out;
  for (auto& v : vars_) out.push_back(v.name);
  return out;
}

bool Factor::has(const std::string& name) const {
  return std::any_of(vars_.begin(), vars_.end(), [&](const Var& v) { return v.name == name; });
}

int Factor::card(const std::string& name) const {
  for (auto& v : vars_)
    if (v.name == name) return v.card;
  throw Error("table has no variable '" + name + "'");
}

double Factor::at(const std::map<std::string, int>& assignment) const {
  auto strides = row_major_strides(vars_);
  std::size_t idx = 0;
  for (std::size_t i = 0; i < vars_.size(); ++i) {
    auto it = assignment.find(vars_[i].name);
    if (it == assignment.end()) throw Error("assignment misses '" + vars_[i].name + "'");
    if (it->second < 0 || it->second >= vars_[i].card)
      throw Error("state out of range for '" + vars_[i].name + "'");
    idx += strides[i] * static_cast<std::size_t>(it->second);
  }
  return values_[idx];
}

std::map<std::string, int> Factor::assignment(std::size_t index) const {
  std::map<std::string, int> out;
  for (std::size_t i = vars_.size(); i-- > 0;) {
    out[vars_[i].name] = static_cast<int>(index % vars_[i].card);
    index /= vars_[i].card;
  }
  return out;
}

double Factor::sum() const {
  double s = 0;
  for (double v : values_) s += v;
  return s;
}

Factor Factor::marginal(const std::vector<std::string>& keep) const {
  std::vector<Var> kept;
  for (auto& v : vars_)
    if (std::find(keep.begin(), keep.end(), v.name) != keep.end()) kept.push_back(v);
  for (auto& k : keep)
    if (!has(k)) throw Error("cannot keep '" + k + "': not in table");
  if (kept.size() == vars_.size()) return *this;
  Factor out = constant(kept, 0.0);
  Walker w(vars_, {strides_within(vars_, kept)});
  std::size_t i = 0;
  do {
    out.values_[w.offset(0)] += values_[i++];
  } while (w.next());
  return out;
}

Factor Factor::sum_out(const std::vector<std::string>& drop) const {
  std::vector<std::string> keep;
  for (auto& v : vars_)
    if (std::find(drop.begin(), drop.end(), v.name) == drop.end()) keep.push_back(v.name);
  return marginal(keep);
}

Factor Factor::slice(const std::map<std::string, int>& assignment) const {
  std::vector<Var> rest;
  auto strides = row_major_strides(vars_);
  std::size_t base = 0;
  for (std::size_t i = 0; i < vars_.size(); ++i) {
    auto it = assignment.find(vars_[i].name);
    if (it == assignment.end()) {
      rest.push_back(vars_[i]);
    } else {
      if (it->second < 0 || it->second >= vars_[i].card)
        throw Error("state out of range for '" + vars_[i].name + "'");
      base += strides[i] * static_cast<std::size_t>(it->second);
    }
  }
  Factor out = constant(rest, 0.0);
  Walker w(rest, {strides_within(rest, vars_)});
  std::size_t i = 0;
  do {
    out.values_[i++] = values_[base + w.offset(0)];
  } while (w.next());
  return out;
}

Factor Factor::relabel(const std::map<std::string, std::string>& renames) const {
  std::vector<Var> vars = vars_;
  for (auto& v : vars) {
    auto it = renames.find(v.name);
    if (it != renames.end()) v.name = it->second;
  }
  return Factor(std::move(vars), values_);
}

Factor Factor::broadcast(const std::vector<Var>& extra) const {
  std::vector<Var> add;
  for (auto& v : extra)
    if (!has(v.name)) add.push_back(v);
  if (add.empty()) return *this;
  return *this * constant(add, 1.0);
}

Factor Factor::map(const std::function<double(double)>& f) const {
  Factor out = *this;
  for (double& v : out.values_) v = f(v);
  return out;
}

std::vector<Var> merge_vars(const std::vector<Var>& a, const std::vector<Var>& b) {
  std::vector<Var> out;
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i].name < b[j].name)) {
      out.push_back(a[i++]);
    } else if (i == a.size() || b[j].name < a[i].name) {
      out.push_back(b[j++]);
    } else {
      if (a[i].card != b[j].card)
        throw Error("variable '" + a[i].name + "' has inconsistent state counts");
      out.push_back(a[i]);
      ++i;
      ++j;
    }
  }
  return out;
}

Factor operator*(const Factor& a, const Factor& b) {
  auto vars = merge_vars(a.vars_, b.vars_);
  Factor out = Factor::constant(vars, 0.0);
  Walker w(vars, {strides_within(vars, a.vars_), strides_within(vars, b.vars_)});
  std::size_t i = 0;
  do {
    out.values_[i++] = a.values_[w.offset(0)] * b.values_[w.offset(1)];
  } while (w.next());
  return out;
}

Factor divide(const Factor& a, const Factor& b, double min_denominator) {
  auto vars = merge_vars(a.vars_, b.vars_);
  Factor out = Factor::constant(vars, 0.0);
  Walker w(vars, {strides_within(vars, a.vars_), strides_within(vars, b.vars_)});
  std::size_t i = 0;
  do {
    double den = b.values_[w.offset(1)];
    if (std::abs(den) < min_denominator)
      throw PositivityViolation("division by " + std::to_string(den) + " at " +
                                format_state(vars, w.state()));
    out.values_[i++] = a.values_[w.offset(0)] / den;
  } while (w.next());
  return out;
}

double max_abs_diff(const Factor& a, const Factor& b) {
  if (a.vars_ != b.vars_) throw Error("comparing tables over different variables");
  double m = 0;
  for (std::size_t i = 0; i < a.values_.size(); ++i)
    m = std::max(m, std::abs(a.values_[i] - b.values_[i]));
  return m;
}

void for_each_state(const std::vector<Var>& vars,
                    const std::function<void(std::size_t, const std::vector<int>&)>& f) {
  checked_size(vars);
  Walker w(vars, {});
  std::size_t i = 0;
  do {
    f(i++, w.state());
  } while (w.next());
}

std::string format_state(const std::vector<Var>& vars, const std::vector<int>& states) {
  std::string out;
  for (std::size_t i = 0; i < vars.size(); ++i) {
    if (i) out += ",";
    out += vars[i].name + "=" + std::to_string(states[i]);
  }
  return out.empty() ? "()" : out;
}

}  // namespace proxid
