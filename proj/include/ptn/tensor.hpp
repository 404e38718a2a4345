#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace ptn {

using Label = std::int64_t;
using Dim = std::int64_t;
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

// Allocator whose value-initialization leaves doubles uninitialized, so
// buffers that are about to be overwritten skip the zero fill.
template <class T>
struct DefaultInitAllocator : std::allocator<T> {
  template <class U>
  struct rebind {
    using other = DefaultInitAllocator<U>;
  };
  using std::allocator<T>::allocator;
  template <class U, class... Args>
  void construct(U* p, Args&&... args) {
    if constexpr (sizeof...(Args) == 0)
      ::new (static_cast<void*>(p)) U;
    else
      ::new (static_cast<void*>(p)) U(std::forward<Args>(args)...);
  }
};
using Buffer = std::vector<double, DefaultInitAllocator<double>>;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ShapeError : Error {
  using Error::Error;
};
struct PsdError : Error {
  using Error::Error;
};

// User labels must stay below this; bra copies and fresh labels live above.
constexpr Label kMaxUserLabel = Label(1) << 40;
constexpr Label kBraOffset = Label(1) << 52;

Label fresh_label();
inline Label bra_label(Label l) { return l + kBraOffset; }

// Accumulates model flops for one job. The active counter is per thread.
struct FlopCounter {
  std::uint64_t total = 0;
};

class FlopScope {
 public:
  explicit FlopScope(FlopCounter& c);
  ~FlopScope();
  FlopScope(const FlopScope&) = delete;
  FlopScope& operator=(const FlopScope&) = delete;

 private:
  FlopCounter* prev_;
};

void charge_flops(std::uint64_t f);
FlopCounter* active_flop_counter();

class Tensor {
 public:
  Tensor();  // order-0 tensor holding 1
  Tensor(std::vector<Label> labels, std::vector<Dim> dims, Buffer data);
  Tensor(std::vector<Label> labels, std::vector<Dim> dims);  // zeros

  static Tensor scalar(double v);

  const std::vector<Label>& labels() const { return labels_; }
  const std::vector<Dim>& dims() const { return dims_; }
  const Buffer& data() const { return data_; }
  Buffer& data() { return data_; }
  std::size_t size() const { return data_.size(); }
  int order() const { return static_cast<int>(labels_.size()); }

  bool has(Label l) const;
  int axis(Label l) const;  // -1 if absent
  Dim dim(Label l) const;
  double value() const;  // order-0 only
  double norm() const;

  Tensor& scale(double s);
  Tensor relabeled(const std::map<Label, Label>& m) const;
  Tensor permuted(const std::vector<Label>& order) const;

 private:
  std::vector<Label> labels_;
  std::vector<Dim> dims_;
  Buffer data_;
};

Dim product(const std::vector<Dim>& d);

// Pairwise contraction over shared labels; output = free labels of a, then of b.
Tensor contract(const Tensor& a, const Tensor& b);

// Contracts a list of tensors greedily (smallest intermediate first).
Tensor contract_all(std::vector<Tensor> ts);
// Same, without copying the inputs.
Tensor contract_all(const std::vector<const Tensor*>& ts);

struct Matricized {
  Matrix m;
  std::vector<Label> row_labels, col_labels;
  std::vector<Dim> row_dims, col_dims;
};

// Rows follow the given label order; columns keep the tensor's relative order.
Matricized matricize(const Tensor& t, const std::vector<Label>& rows);
Tensor tensorize(const Matrix& m, const std::vector<Label>& row_labels, const std::vector<Dim>& row_dims,
                 const std::vector<Label>& col_labels, const std::vector<Dim>& col_dims);

struct QrResult {
  Matrix q;  // m x k, orthonormal columns, k = min(m, n)
  Matrix r;  // k x n
};
QrResult qr(const Matrix& m);

struct EigResult {
  Matrix u;       // n x k, descending eigenvalues
  Vector values;  // kept eigenvalues
  Vector all;     // full spectrum, descending
};
constexpr double kZeroCutoff = 1e-15;
EigResult truncated_eig(const Matrix& l, Dim chi, double cutoff = kZeroCutoff);

struct FactorResult {
  Matrix u;  // m x k, orthonormal columns
  Matrix s;  // k x n
  Vector singular;  // full spectrum, descending
};
FactorResult truncated_factor(const Matrix& m, Dim chi, double cutoff = kZeroCutoff);

Tensor identity_tensor(Label a, Label b, Dim n);

// Tensor over `rows` and their bra copies as a square matrix.
Matrix paired_matrix(const Tensor& t, const std::vector<Label>& rows);

}  // namespace ptn
