#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace infoq {

inline constexpr std::size_t kDefaultMaxCells = std::size_t{1} << 22;

// |sum - 1| at or below this is accepted as normalized.
inline constexpr double kNormTolerance = 1e-9;
// Inputs this close to normalized are divided by their sum and flagged.
inline constexpr double kRenormTolerance = 1e-6;

struct Variable {
  std::string name;
  std::vector<std::string> support;

  std::size_t size() const noexcept { return support.size(); }
  std::optional<std::size_t> index_of(std::string_view label) const;

  friend bool operator==(const Variable&, const Variable&) = default;
};

// A set of observed outcomes: variable name -> outcome index.
class Assignment {
 public:
  Assignment() = default;
  Assignment(std::initializer_list<std::pair<const std::string, std::size_t>> init) : bindings_(init) {}

  void bind(const std::string& name, std::size_t outcome) { bindings_[name] = outcome; }
  std::optional<std::size_t> find(const std::string& name) const;
  bool contains(const std::string& name) const { return bindings_.count(name) != 0; }
  bool empty() const noexcept { return bindings_.empty(); }
  std::size_t size() const noexcept { return bindings_.size(); }

  auto begin() const { return bindings_.begin(); }
  auto end() const { return bindings_.end(); }

  friend bool operator==(const Assignment&, const Assignment&) = default;

 private:
  std::map<std::string, std::size_t> bindings_;
};

// Variables plus row-major strides (last variable fastest). Shared by the
// normalized and unnormalized tensor types.
class TensorShape {
 public:
  TensorShape() = default;
  explicit TensorShape(std::vector<Variable> variables, std::size_t max_cells = kDefaultMaxCells);

  const std::vector<Variable>& variables() const noexcept { return variables_; }
  std::size_t rank() const noexcept { return variables_.size(); }
  std::size_t cell_count() const noexcept { return cells_; }
  std::size_t stride(std::size_t axis) const { return strides_.at(axis); }

  std::optional<std::size_t> axis_of(std::string_view name) const;
  // Throws UnknownVariable.
  std::size_t require_axis(std::string_view name) const;

  std::size_t flat_index(std::span<const std::size_t> outcome) const;
  void unravel(std::size_t flat, std::span<std::size_t> outcome) const;
  std::vector<std::string> names() const;

  // Validates every binding against this shape (UnknownVariable / DomainError).
  void check(const Assignment& a) const;

  friend bool operator==(const TensorShape&, const TensorShape&) = default;

 private:
  std::vector<Variable> variables_;
  std::vector<std::size_t> strides_;
  std::size_t cells_ = 1;
};

class JointDistribution {
 public:
  // The empty distribution: zero variables, one cell of mass 1.
  JointDistribution();
  JointDistribution(std::vector<Variable> variables, std::vector<double> probs,
                    std::size_t max_cells = kDefaultMaxCells);

  const TensorShape& shape() const noexcept { return shape_; }
  const std::vector<Variable>& variables() const noexcept { return shape_.variables(); }
  std::span<const double> probs() const noexcept { return probs_; }
  std::size_t rank() const noexcept { return shape_.rank(); }
  std::size_t cell_count() const noexcept { return shape_.cell_count(); }

  const Variable& variable(std::string_view name) const;
  double at(std::span<const std::size_t> outcome) const { return probs_[shape_.flat_index(outcome)]; }

  // True when the input was within kRenormTolerance but not kNormTolerance of
  // one and was divided by its sum.
  bool renormalized() const noexcept { return renormalized_; }

  friend bool operator==(const JointDistribution& a, const JointDistribution& b) {
    return a.shape_ == b.shape_ && a.probs_ == b.probs_;
  }

 private:
  TensorShape shape_;
  std::vector<double> probs_;
  bool renormalized_ = false;
};

// Non-negative function with total mass Z (not necessarily 1).
class UnnormalizedWeight {
 public:
  UnnormalizedWeight(std::vector<Variable> variables, std::vector<double> cells,
                     std::size_t max_cells = kDefaultMaxCells);
  explicit UnnormalizedWeight(const JointDistribution& d);

  const TensorShape& shape() const noexcept { return shape_; }
  const std::vector<Variable>& variables() const noexcept { return shape_.variables(); }
  std::span<const double> cells() const noexcept { return cells_; }
  double total_mass() const noexcept { return total_; }

  JointDistribution normalized() const;
  UnnormalizedWeight scaled(double alpha) const;
  UnnormalizedWeight power(double alpha) const;
  // Cell-wise product; both weights must have identical variables.
  UnnormalizedWeight times(const UnnormalizedWeight& other) const;

 private:
  TensorShape shape_;
  std::vector<double> cells_;
  double total_ = 0.0;
};

// Keeps the listed variables (in the distribution's own order) and sums out the
// rest. `keep` must be non-empty.
JointDistribution marginalize(const JointDistribution& d, const std::vector<std::string>& keep);

// Probability of the slice selected by `a` (p(a)).
double slice_mass(const JointDistribution& d, const Assignment& a);

// p(unbound | a). Throws ZeroProbabilityEvent when p(a) <= 1e-12.
JointDistribution condition(const JointDistribution& d, const Assignment& a);

// Independent product p1(x) p2(y). Throws NameCollision on shared names.
JointDistribution product(const JointDistribution& d1, const JointDistribution& d2);

// alpha * d1 + (1 - alpha) * d2 over identical variables.
JointDistribution mix(const JointDistribution& d1, const JointDistribution& d2, double alpha);

// Same distribution with the variables listed in `order` (a permutation).
JointDistribution reorder(const JointDistribution& d, const std::vector<std::string>& order);

namespace detail {
// Marginal over `keep` where an empty list yields the one-cell distribution.
JointDistribution marginal_or_scalar(const JointDistribution& d, const std::vector<std::string>& keep);
// For each cell of `from`, the flat index of the matching cell in `to`, whose
// variables are a subset of `from`'s.
std::vector<std::size_t> projection(const TensorShape& from, const TensorShape& to);
}  // namespace detail

}  // namespace infoq
