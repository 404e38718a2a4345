#include "ptn/tensor.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iostream>
#include <memory>
#include <numeric>

namespace ptn {

namespace {
std::atomic<Label> g_next_label{kMaxUserLabel};
thread_local FlopCounter* t_counter = nullptr;

std::vector<Dim> strides_of(const std::vector<Dim>& dims) {
  std::vector<Dim> s(dims.size(), 1);
  for (int i = static_cast<int>(dims.size()) - 2; i >= 0; --i) s[i] = s[i + 1] * dims[i + 1];
  return s;
}
// out[i_0..i_n] = in[sum i_k st[k]] with out laid out row-major over nd.
void permute_data(const double* in, double* out, const std::vector<Dim>& nd0, const std::vector<Dim>& st0) {
  std::vector<Dim> nd, st;
  for (std::size_t i = 0; i < nd0.size(); ++i) {
    if (nd0[i] == 1) continue;
    if (!nd.empty() && st.back() == st0[i] * nd0[i]) {
      nd.back() *= nd0[i];
      st.back() = st0[i];
    } else {
      nd.push_back(nd0[i]);
      st.push_back(st0[i]);
    }
  }
  const int n = nd.size();
  if (n == 0) {
    out[0] = in[0];
    return;
  }
  std::vector<Dim> os = strides_of(nd);
  const int c = n - 1;
  int q = c;
  for (int i = 0; i < n; ++i)
    if (st[i] == 1) q = i;
  // Odometer over every axis except q and c; each step moves a 2D block.
  std::vector<int> outer;
  for (int i = 0; i < n; ++i)
    if (i != q && i != c) outer.push_back(i);
  std::vector<Dim> idx(outer.size(), 0);
  Dim ioff = 0, ooff = 0;
  const Dim nc = nd[c], sc = st[c];
  const Dim nq = q == c ? 1 : nd[q], oq = os[q];
  constexpr Dim T = 16;
  for (;;) {
    if (q == c) {
      const double* src = in + ioff;
      double* dst = out + ooff;
      if (sc == 1)
        std::copy(src, src + nc, dst);
      else
        for (Dim j = 0; j < nc; ++j) dst[j] = src[j * sc];
    } else {
      for (Dim i0 = 0; i0 < nq; i0 += T)
        for (Dim j0 = 0; j0 < nc; j0 += T) {
          const Dim i1 = std::min(nq, i0 + T), j1 = std::min(nc, j0 + T);
          for (Dim i = i0; i < i1; ++i) {
            const double* src = in + ioff + i;
            double* dst = out + ooff + i * oq;
            for (Dim j = j0; j < j1; ++j) dst[j] = src[j * sc];
          }
        }
    }
    int a = static_cast<int>(outer.size()) - 1;
    for (; a >= 0; --a) {
      const int ax = outer[a];
      ++idx[a];
      ioff += st[ax];
      ooff += os[ax];
      if (idx[a] < nd[ax]) break;
      ioff -= st[ax] * nd[ax];
      ooff -= os[ax] * nd[ax];
      idx[a] = 0;
    }
    if (a < 0) break;
  }
}
}  // namespace

Label fresh_label() { return g_next_label.fetch_add(1); }

FlopScope::FlopScope(FlopCounter& c) : prev_(t_counter) { t_counter = &c; }
FlopScope::~FlopScope() { t_counter = prev_; }

void charge_flops(std::uint64_t f) {
  if (t_counter) t_counter->total += f;
}
FlopCounter* active_flop_counter() { return t_counter; }

Dim product(const std::vector<Dim>& d) {
  Dim p = 1;
  for (Dim x : d) p *= x;
  return p;
}

Tensor::Tensor() : data_{1.0} {}

Tensor::Tensor(std::vector<Label> labels, std::vector<Dim> dims, Buffer data)
    : labels_(std::move(labels)), dims_(std::move(dims)), data_(std::move(data)) {
  if (labels_.size() != dims_.size()) throw ShapeError("label/dim count mismatch");
  for (Dim d : dims_)
    if (d < 1) throw ShapeError("mode size must be positive");
  for (std::size_t i = 0; i < labels_.size(); ++i)
    for (std::size_t j = i + 1; j < labels_.size(); ++j)
      if (labels_[i] == labels_[j]) throw ShapeError("duplicate mode label " + std::to_string(labels_[i]));
  if (static_cast<Dim>(data_.size()) != product(dims_)) throw ShapeError("data length does not match mode sizes");
}

Tensor::Tensor(std::vector<Label> labels, std::vector<Dim> dims)
    : Tensor(labels, dims, Buffer(static_cast<std::size_t>(product(dims)), 0.0)) {}

Tensor Tensor::scalar(double v) { return Tensor({}, {}, {v}); }

bool Tensor::has(Label l) const { return axis(l) >= 0; }

int Tensor::axis(Label l) const {
  for (std::size_t i = 0; i < labels_.size(); ++i)
    if (labels_[i] == l) return static_cast<int>(i);
  return -1;
}

Dim Tensor::dim(Label l) const {
  int a = axis(l);
  if (a < 0) throw ShapeError("unknown mode label " + std::to_string(l));
  return dims_[a];
}

double Tensor::value() const {
  if (!labels_.empty()) throw ShapeError("value() on a non-scalar tensor");
  return data_[0];
}

double Tensor::norm() const {
  double s = 0;
  for (double x : data_) s += x * x;
  return std::sqrt(s);
}

Tensor& Tensor::scale(double s) {
  for (double& x : data_) x *= s;
  return *this;
}

Tensor Tensor::relabeled(const std::map<Label, Label>& m) const {
  std::vector<Label> l = labels_;
  for (Label& x : l) {
    auto it = m.find(x);
    if (it != m.end()) x = it->second;
  }
  return Tensor(std::move(l), dims_, data_);
}

Tensor Tensor::permuted(const std::vector<Label>& order) const {
  if (order.size() != labels_.size()) throw ShapeError("permutation has wrong length");
  const int n = order.size();
  std::vector<int> src(n);
  bool same = true;
  for (int i = 0; i < n; ++i) {
    src[i] = axis(order[i]);
    if (src[i] < 0) throw ShapeError("unknown mode label " + std::to_string(order[i]));
    same = same && src[i] == i;
  }
  if (same) return *this;
  std::vector<Dim> nd(n);
  for (int i = 0; i < n; ++i) nd[i] = dims_[src[i]];
  std::vector<Dim> os = strides_of(dims_);
  std::vector<Dim> st(n);
  for (int i = 0; i < n; ++i) st[i] = os[src[i]];
  Buffer out(data_.size());
  if (!out.empty()) permute_data(data_.data(), out.data(), nd, st);
  return Tensor(order, nd, std::move(out));
}

Tensor contract(const Tensor& a, const Tensor& b) {
  std::vector<Label> fa, sh, fb;
  std::vector<Dim> dfa, dfb;
  Dim m = 1, k = 1, n = 1;
  for (int i = 0; i < a.order(); ++i) {
    Label l = a.labels()[i];
    int j = b.axis(l);
    if (j >= 0) {
      if (b.dims()[j] != a.dims()[i])
        throw ShapeError("contract: size mismatch on shared label " + std::to_string(l));
      sh.push_back(l);
      k *= a.dims()[i];
    } else {
      fa.push_back(l);
      dfa.push_back(a.dims()[i]);
      m *= a.dims()[i];
    }
  }
  for (int i = 0; i < b.order(); ++i) {
    Label l = b.labels()[i];
    if (!a.has(l)) {
      fb.push_back(l);
      dfb.push_back(b.dims()[i]);
      n *= b.dims()[i];
    }
  }
  // Shared labels may sit contiguously at either end of an operand, in which
  // case it is used in place (possibly transposed) instead of being permuted.
  auto block = [&](const Tensor& t, bool& front) {
    const int ns = sh.size(), no = t.order();
    auto shared_at = [&](int i) { return std::find(sh.begin(), sh.end(), t.labels()[i]) != sh.end(); };
    bool f = true, b = true;
    for (int i = 0; i < no; ++i) {
      f = f && (i < ns) == shared_at(i);
      b = b && (i >= no - ns) == shared_at(i);
    }
    front = f;
    std::vector<Label> order;
    if (f || b)
      for (int i = f ? 0 : no - ns; i < (f ? ns : no); ++i) order.push_back(t.labels()[i]);
    return order;
  };
  bool a_front = false, b_front = false;
  std::vector<Label> sa = block(a, a_front), sb = block(b, b_front);
  const bool a_ok = sa.size() == sh.size(), b_ok = sb.size() == sh.size();
  // Shared order follows the larger operand's layout.
  const Tensor& big = a.size() >= b.size() ? a : b;
  const Tensor& small = a.size() >= b.size() ? b : a;
  sh.clear();
  for (Label l : big.labels())
    if (small.has(l)) sh.push_back(l);
  const bool a_inplace = a_ok && sa == sh, b_inplace = b_ok && sb == sh;
  auto ends_shared = [&](const Tensor& t) {
    return t.order() > 0 && std::find(sh.begin(), sh.end(), t.labels().back()) != sh.end();
  };
  // A permuted operand keeps its trailing axes in place where possible.
  auto arrange = [&](const std::vector<Label>& free, bool shared_last) {
    std::vector<Label> o = shared_last ? free : sh;
    const auto& tail = shared_last ? sh : free;
    o.insert(o.end(), tail.begin(), tail.end());
    return o;
  };
  Tensor pa, pb;
  if (!a_inplace) {
    a_front = !ends_shared(a);
    pa = a.permuted(arrange(fa, !a_front));
  }
  if (!b_inplace) {
    b_front = !ends_shared(b);
    pb = b.permuted(arrange(fb, !b_front));
  }
  const double* da = a_inplace ? a.data().data() : pa.data().data();
  const double* db = b_inplace ? b.data().data() : pb.data().data();
  charge_flops(static_cast<std::uint64_t>(m) * static_cast<std::uint64_t>(k) * static_cast<std::uint64_t>(n));
  Buffer out(static_cast<std::size_t>(m * n));
  Eigen::Map<Matrix> C(out.data(), m, n);
  // a is (free, shared) unless a_front; b is (shared, free) unless !b_front.
  if (!a_front && b_front)
    C.noalias() = Eigen::Map<const Matrix>(da, m, k) * Eigen::Map<const Matrix>(db, k, n);
  else if (!a_front)
    C.noalias() = Eigen::Map<const Matrix>(da, m, k) * Eigen::Map<const Matrix>(db, n, k).transpose();
  else if (b_front)
    C.noalias() = Eigen::Map<const Matrix>(da, k, m).transpose() * Eigen::Map<const Matrix>(db, k, n);
  else
    C.noalias() = Eigen::Map<const Matrix>(da, k, m).transpose() * Eigen::Map<const Matrix>(db, n, k).transpose();
  std::vector<Label> ol = fa;
  ol.insert(ol.end(), fb.begin(), fb.end());
  std::vector<Dim> od = dfa;
  od.insert(od.end(), dfb.begin(), dfb.end());
  return Tensor(std::move(ol), std::move(od), std::move(out));
}

namespace {
struct PairScore {
  double out_size;
  double cost;
};

PairScore score(const Tensor& a, const Tensor& b, bool& shares) {
  double out = 1, shared = 1;
  shares = false;
  for (int i = 0; i < a.order(); ++i) {
    if (b.has(a.labels()[i])) {
      shares = true;
      shared *= a.dims()[i];
    } else {
      out *= a.dims()[i];
    }
  }
  for (int i = 0; i < b.order(); ++i)
    if (!a.has(b.labels()[i])) out *= b.dims()[i];
  return {out, out * shared};
}
}  // namespace

Tensor contract_all(const std::vector<const Tensor*>& in) {
  if (in.empty()) return Tensor::scalar(1.0);
  // Inputs are borrowed; intermediates are owned and freed once consumed.
  std::vector<const Tensor*> ts = in;
  std::vector<std::unique_ptr<Tensor>> own(in.size());
  while (ts.size() > 1) {
    int bi = -1, bj = -1;
    PairScore best{0, 0};
    for (std::size_t i = 0; i < ts.size(); ++i)
      for (std::size_t j = i + 1; j < ts.size(); ++j) {
        bool shares;
        PairScore s = score(*ts[i], *ts[j], shares);
        if (!shares) continue;
        if (bi < 0 || s.out_size < best.out_size || (s.out_size == best.out_size && s.cost < best.cost)) {
          best = s;
          bi = i;
          bj = j;
        }
      }
    if (bi < 0) {
      // Disconnected pieces: outer product of the two smallest.
      std::vector<std::size_t> ix(ts.size());
      std::iota(ix.begin(), ix.end(), 0);
      std::stable_sort(ix.begin(), ix.end(), [&](auto x, auto y) { return ts[x]->size() < ts[y]->size(); });
      bi = std::min(ix[0], ix[1]);
      bj = std::max(ix[0], ix[1]);
    }
    auto c = std::make_unique<Tensor>(contract(*ts[bi], *ts[bj]));
    ts.erase(ts.begin() + bj);
    own.erase(own.begin() + bj);
    ts[bi] = c.get();
    own[bi] = std::move(c);
  }
  return own[0] ? std::move(*own[0]) : *ts[0];
}

Tensor contract_all(std::vector<Tensor> ts) {
  if (ts.size() == 1) return std::move(ts[0]);
  std::vector<const Tensor*> p;
  for (const Tensor& t : ts) p.push_back(&t);
  return contract_all(p);
}

Matricized matricize(const Tensor& t, const std::vector<Label>& rows) {
  Matricized r;
  for (Label l : rows) {
    if (!t.has(l)) throw ShapeError("matricize: unknown label " + std::to_string(l));
    r.row_labels.push_back(l);
    r.row_dims.push_back(t.dim(l));
  }
  for (int i = 0; i < t.order(); ++i) {
    Label l = t.labels()[i];
    if (std::find(rows.begin(), rows.end(), l) == rows.end()) {
      r.col_labels.push_back(l);
      r.col_dims.push_back(t.dims()[i]);
    }
  }
  std::vector<Label> ord = r.row_labels;
  ord.insert(ord.end(), r.col_labels.begin(), r.col_labels.end());
  Tensor p = t.permuted(ord);
  r.m = Eigen::Map<const Matrix>(p.data().data(), product(r.row_dims), product(r.col_dims));
  return r;
}

Tensor tensorize(const Matrix& m, const std::vector<Label>& row_labels, const std::vector<Dim>& row_dims,
                 const std::vector<Label>& col_labels, const std::vector<Dim>& col_dims) {
  if (m.rows() != product(row_dims) || m.cols() != product(col_dims)) throw ShapeError("tensorize: shape mismatch");
  std::vector<Label> l = row_labels;
  l.insert(l.end(), col_labels.begin(), col_labels.end());
  std::vector<Dim> d = row_dims;
  d.insert(d.end(), col_dims.begin(), col_dims.end());
  return Tensor(std::move(l), std::move(d), Buffer(m.data(), m.data() + m.size()));
}

QrResult qr(const Matrix& m) {
  const Dim rows = m.rows(), cols = m.cols();
  const Dim k = std::min(rows, cols);
  charge_flops(static_cast<std::uint64_t>(rows) * cols * k);
  Eigen::HouseholderQR<Eigen::MatrixXd> h(m);
  QrResult r;
  r.q = h.householderQ() * Eigen::MatrixXd::Identity(rows, k);
  r.r = h.matrixQR().topRows(k).triangularView<Eigen::Upper>();
  return r;
}

EigResult truncated_eig(const Matrix& l, Dim chi, double cutoff) {
  if (l.rows() != l.cols()) throw ShapeError("truncated_eig: matrix not square");
  if (chi < 1) throw ShapeError("truncated_eig: chi must be positive");
  const Dim n = l.rows();
  const double fro = l.norm();
  const double asym = (l - l.transpose()).norm();
  if (asym > 1e-10 * fro) std::cerr << "warning: density matrix asymmetric by " << asym / fro << ", symmetrizing\n";
  Eigen::MatrixXd sym = 0.5 * (l + l.transpose());
  charge_flops(static_cast<std::uint64_t>(n) * n * n);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
  const Vector& ev = es.eigenvalues();
  std::vector<int> ix(n);
  std::iota(ix.begin(), ix.end(), 0);
  std::stable_sort(ix.begin(), ix.end(), [&](int a, int b) { return ev[a] > ev[b]; });
  EigResult r;
  r.all.resize(n);
  for (Dim i = 0; i < n; ++i) r.all[i] = ev[ix[i]];
  const double top = n ? r.all[0] : 0.0;
  if (n && r.all[n - 1] < -1e-10 * std::max(top, 0.0) && r.all[n - 1] < 0)
    throw PsdError("truncated_eig: negative eigenvalue " + std::to_string(r.all[n - 1]));
  Dim keep = 0;
  for (Dim i = 0; i < n; ++i)
    if (r.all[i] > cutoff * top) ++keep;
  keep = std::max<Dim>(1, std::min(keep, chi));
  keep = std::min(keep, n);
  r.u.resize(n, keep);
  r.values.resize(keep);
  for (Dim j = 0; j < keep; ++j) {
    r.u.col(j) = es.eigenvectors().col(ix[j]);
    r.values[j] = r.all[j];
  }
  return r;
}

FactorResult truncated_factor(const Matrix& m, Dim chi, double cutoff) {
  if (chi < 1) throw ShapeError("truncated_factor: chi must be positive");
  const Dim rows = m.rows(), cols = m.cols();
  const Dim mn = std::min(rows, cols);
  charge_flops(static_cast<std::uint64_t>(rows) * cols * std::min(mn, chi));
  Eigen::BDCSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  FactorResult r;
  r.singular = svd.singularValues();
  const double top = mn ? r.singular[0] : 0.0;
  Dim keep = 0;
  for (Dim i = 0; i < mn; ++i)
    if (r.singular[i] > cutoff * top) ++keep;
  keep = std::max<Dim>(1, std::min(keep, chi));
  keep = std::min(keep, mn);
  r.u = svd.matrixU().leftCols(keep);
  r.s = r.singular.head(keep).asDiagonal() * svd.matrixV().leftCols(keep).transpose();
  return r;
}

Tensor identity_tensor(Label a, Label b, Dim n) {
  Tensor t({a, b}, {n, n});
  for (Dim i = 0; i < n; ++i) t.data()[i * n + i] = 1.0;
  return t;
}

Matrix paired_matrix(const Tensor& t, const std::vector<Label>& rows) {
  std::vector<Label> ord = rows;
  Dim n = 1;
  for (Label l : rows) {
    ord.push_back(bra_label(l));
    n *= t.dim(l);
  }
  Tensor p = t.permuted(ord);
  return Eigen::Map<const Matrix>(p.data().data(), n, n);
}

}  // namespace ptn
