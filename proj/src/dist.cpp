#include "infoq/dist.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "infoq/errors.hpp"

namespace infoq {

namespace {

constexpr double kZeroSliceMass = 1e-12;

std::string join(const std::vector<std::string>& parts) {
  std::ostringstream os;
  for (std::size_t i = 0; i < parts.size(); ++i) os << (i ? ", " : "") << parts[i];
  return os.str();
}

// Maps each cell of `from` onto the flat index of `to`, where `to` carries a
// subset of `from`'s variables.
std::vector<std::size_t> projection(const TensorShape& from, const TensorShape& to) {
  std::vector<std::size_t> axis_stride(from.rank(), 0);
  for (std::size_t i = 0; i < to.rank(); ++i) {
    axis_stride[from.require_axis(to.variables()[i].name)] = to.stride(i);
  }
  std::vector<std::size_t> out(from.cell_count());
  std::vector<std::size_t> idx(from.rank(), 0);
  for (std::size_t flat = 0; flat < from.cell_count(); ++flat) {
    std::size_t target = 0;
    for (std::size_t a = 0; a < idx.size(); ++a) target += idx[a] * axis_stride[a];
    out[flat] = target;
    for (std::size_t a = idx.size(); a-- > 0;) {
      if (++idx[a] < from.variables()[a].size()) break;
      idx[a] = 0;
    }
  }
  return out;
}

std::vector<Variable> select(const TensorShape& shape, const std::vector<std::string>& keep) {
  std::set<std::string> wanted;
  for (const auto& name : keep) {
    shape.require_axis(name);
    wanted.insert(name);
  }
  std::vector<Variable> vars;
  for (const auto& v : shape.variables()) {
    if (wanted.count(v.name)) vars.push_back(v);
  }
  return vars;
}

void check_cells(std::span<const double> cells, std::size_t expected) {
  if (cells.size() != expected) {
    throw InvalidDistribution("tensor has " + std::to_string(cells.size()) + " cells, expected " +
                              std::to_string(expected));
  }
  for (double c : cells) {
    if (!std::isfinite(c) || c < 0.0) throw InvalidDistribution("cells must be finite and non-negative");
  }
}

}  // namespace

std::optional<std::size_t> Variable::index_of(std::string_view label) const {
  auto it = std::find(support.begin(), support.end(), label);
  if (it == support.end()) return std::nullopt;
  return static_cast<std::size_t>(it - support.begin());
}

std::optional<std::size_t> Assignment::find(const std::string& name) const {
  auto it = bindings_.find(name);
  if (it == bindings_.end()) return std::nullopt;
  return it->second;
}

TensorShape::TensorShape(std::vector<Variable> variables, std::size_t max_cells)
    : variables_(std::move(variables)) {
  std::set<std::string> names;
  for (const auto& v : variables_) {
    if (v.name.empty()) throw InvalidDistribution("variable name must be non-empty");
    if (!names.insert(v.name).second) throw InvalidDistribution("duplicate variable name '" + v.name + "'");
    if (v.support.empty()) throw InvalidDistribution("variable '" + v.name + "' has an empty support");
    std::set<std::string> labels(v.support.begin(), v.support.end());
    if (labels.size() != v.support.size()) {
      throw InvalidDistribution("variable '" + v.name + "' has duplicate outcome labels");
    }
  }
  strides_.assign(variables_.size(), 1);
  cells_ = 1;
  for (std::size_t a = variables_.size(); a-- > 0;) {
    strides_[a] = cells_;
    if (variables_[a].size() > max_cells / cells_) {
      throw CellCapExceeded("distribution exceeds the cell cap of " + std::to_string(max_cells));
    }
    cells_ *= variables_[a].size();
  }
}

std::optional<std::size_t> TensorShape::axis_of(std::string_view name) const {
  for (std::size_t i = 0; i < variables_.size(); ++i) {
    if (variables_[i].name == name) return i;
  }
  return std::nullopt;
}

std::size_t TensorShape::require_axis(std::string_view name) const {
  if (auto a = axis_of(name)) return *a;
  throw UnknownVariable("unknown variable '" + std::string(name) + "' (have: " + join(names()) + ")");
}

std::size_t TensorShape::flat_index(std::span<const std::size_t> outcome) const {
  std::size_t flat = 0;
  for (std::size_t a = 0; a < variables_.size(); ++a) flat += outcome[a] * strides_[a];
  return flat;
}

void TensorShape::unravel(std::size_t flat, std::span<std::size_t> outcome) const {
  for (std::size_t a = 0; a < variables_.size(); ++a) {
    outcome[a] = flat / strides_[a];
    flat %= strides_[a];
  }
}

std::vector<std::string> TensorShape::names() const {
  std::vector<std::string> out;
  for (const auto& v : variables_) out.push_back(v.name);
  return out;
}

void TensorShape::check(const Assignment& a) const {
  for (const auto& [name, outcome] : a) {
    const auto axis = require_axis(name);
    if (outcome >= variables_[axis].size()) {
      throw DomainError("outcome index " + std::to_string(outcome) + " out of range for '" + name + "'");
    }
  }
}

JointDistribution::JointDistribution() : probs_{1.0} {}

JointDistribution::JointDistribution(std::vector<Variable> variables, std::vector<double> probs,
                                     std::size_t max_cells)
    : shape_(std::move(variables), max_cells), probs_(std::move(probs)) {
  check_cells(probs_, shape_.cell_count());
  const double sum = std::accumulate(probs_.begin(), probs_.end(), 0.0);
  const double off = std::abs(sum - 1.0);
  if (off > kRenormTolerance) {
    std::ostringstream os;
    os.precision(17);
    os << "probabilities sum to " << sum << ", not 1";
    throw InvalidDistribution(os.str());
  }
  if (off > kNormTolerance) {
    for (double& p : probs_) p /= sum;
    renormalized_ = true;
  }
}

const Variable& JointDistribution::variable(std::string_view name) const {
  return shape_.variables()[shape_.require_axis(name)];
}

UnnormalizedWeight::UnnormalizedWeight(std::vector<Variable> variables, std::vector<double> cells,
                                       std::size_t max_cells)
    : shape_(std::move(variables), max_cells), cells_(std::move(cells)) {
  check_cells(cells_, shape_.cell_count());
  total_ = std::accumulate(cells_.begin(), cells_.end(), 0.0);
  if (!(total_ > 0.0)) throw InvalidDistribution("weight has zero total mass");
}

UnnormalizedWeight::UnnormalizedWeight(const JointDistribution& d)
    : shape_(d.shape()), cells_(d.probs().begin(), d.probs().end()), total_(1.0) {}

JointDistribution UnnormalizedWeight::normalized() const {
  std::vector<double> probs(cells_);
  for (double& p : probs) p /= total_;
  return JointDistribution(shape_.variables(), std::move(probs));
}

UnnormalizedWeight UnnormalizedWeight::scaled(double alpha) const {
  if (!(alpha > 0.0)) throw DomainError("scale factor must be positive");
  std::vector<double> cells(cells_);
  for (double& c : cells) c *= alpha;
  return UnnormalizedWeight(shape_.variables(), std::move(cells));
}

UnnormalizedWeight UnnormalizedWeight::power(double alpha) const {
  std::vector<double> cells(cells_);
  for (double& c : cells) c = c > 0.0 ? std::pow(c, alpha) : 0.0;
  return UnnormalizedWeight(shape_.variables(), std::move(cells));
}

UnnormalizedWeight UnnormalizedWeight::times(const UnnormalizedWeight& other) const {
  if (!(shape_ == other.shape_)) throw SupportMismatch("cell-wise product needs identical variables");
  std::vector<double> cells(cells_);
  for (std::size_t i = 0; i < cells.size(); ++i) cells[i] *= other.cells_[i];
  return UnnormalizedWeight(shape_.variables(), std::move(cells));
}

namespace detail {

std::vector<std::size_t> projection(const TensorShape& from, const TensorShape& to) {
  return infoq::projection(from, to);
}

JointDistribution marginal_or_scalar(const JointDistribution& d, const std::vector<std::string>& keep) {
  auto vars = select(d.shape(), keep);
  if (vars.size() == d.rank()) return d;
  TensorShape target(vars);
  const auto map = projection(d.shape(), target);
  std::vector<double> probs(target.cell_count(), 0.0);
  for (std::size_t i = 0; i < map.size(); ++i) probs[map[i]] += d.probs()[i];
  return JointDistribution(std::move(vars), std::move(probs));
}

}  // namespace detail

JointDistribution marginalize(const JointDistribution& d, const std::vector<std::string>& keep) {
  if (keep.empty()) throw InvalidQuery("marginalize needs at least one variable to keep");
  return detail::marginal_or_scalar(d, keep);
}

double slice_mass(const JointDistribution& d, const Assignment& a) {
  d.shape().check(a);
  std::vector<std::size_t> idx(d.rank());
  std::vector<std::pair<std::size_t, std::size_t>> fixed;
  for (const auto& [name, outcome] : a) fixed.emplace_back(d.shape().require_axis(name), outcome);
  double mass = 0.0;
  for (std::size_t flat = 0; flat < d.cell_count(); ++flat) {
    d.shape().unravel(flat, idx);
    bool match = true;
    for (const auto& [axis, outcome] : fixed) match = match && idx[axis] == outcome;
    if (match) mass += d.probs()[flat];
  }
  return mass;
}

JointDistribution condition(const JointDistribution& d, const Assignment& a) {
  d.shape().check(a);
  std::vector<Variable> free_vars;
  for (const auto& v : d.variables()) {
    if (!a.contains(v.name)) free_vars.push_back(v);
  }
  TensorShape target(free_vars);
  std::vector<std::size_t> idx(d.rank());
  std::vector<double> probs(target.cell_count(), 0.0);
  std::vector<std::size_t> out(target.rank());
  double mass = 0.0;
  for (std::size_t flat = 0; flat < d.cell_count(); ++flat) {
    d.shape().unravel(flat, idx);
    bool match = true;
    std::size_t k = 0;
    for (std::size_t axis = 0; axis < d.rank(); ++axis) {
      if (auto bound = a.find(d.variables()[axis].name)) {
        match = match && idx[axis] == *bound;
      } else {
        out[k++] = idx[axis];
      }
    }
    if (!match) continue;
    probs[target.flat_index(out)] += d.probs()[flat];
    mass += d.probs()[flat];
  }
  if (mass <= kZeroSliceMass) {
    std::ostringstream os;
    os << "conditioning on an event of probability " << mass;
    throw ZeroProbabilityEvent(os.str());
  }
  for (double& p : probs) p /= mass;
  return JointDistribution(std::move(free_vars), std::move(probs));
}

JointDistribution product(const JointDistribution& d1, const JointDistribution& d2) {
  for (const auto& v : d2.variables()) {
    if (d1.shape().axis_of(v.name)) throw NameCollision("variable '" + v.name + "' appears in both factors");
  }
  std::vector<Variable> vars = d1.variables();
  vars.insert(vars.end(), d2.variables().begin(), d2.variables().end());
  std::vector<double> probs;
  probs.reserve(d1.cell_count() * d2.cell_count());
  for (double a : d1.probs()) {
    for (double b : d2.probs()) probs.push_back(a * b);
  }
  return JointDistribution(std::move(vars), std::move(probs));
}

JointDistribution mix(const JointDistribution& d1, const JointDistribution& d2, double alpha) {
  if (!(d1.shape() == d2.shape())) throw SupportMismatch("mixture components need identical variables");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw DomainError("mixture weight must lie in [0, 1]");
  std::vector<double> probs(d1.cell_count());
  for (std::size_t i = 0; i < probs.size(); ++i) probs[i] = alpha * d1.probs()[i] + (1.0 - alpha) * d2.probs()[i];
  return JointDistribution(d1.variables(), std::move(probs));
}

JointDistribution reorder(const JointDistribution& d, const std::vector<std::string>& order) {
  if (order.size() != d.rank()) throw InvalidQuery("reorder needs a permutation of all variables");
  std::vector<Variable> vars;
  for (const auto& name : order) vars.push_back(d.variable(name));
  TensorShape target(vars);
  if (target.rank() != d.rank()) throw InvalidQuery("reorder needs a permutation of all variables");
  const auto map = projection(d.shape(), target);
  std::vector<double> probs(d.cell_count());
  for (std::size_t i = 0; i < map.size(); ++i) probs[map[i]] = d.probs()[i];
  return JointDistribution(std::move(vars), std::move(probs));
}

}  // namespace infoq
