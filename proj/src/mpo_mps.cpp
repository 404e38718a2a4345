#include "ptn/mpo_mps.hpp"

#include "ptn/treeapprox.hpp"

#include <algorithm>
#include <random>
#include <set>

namespace ptn {

namespace {

Label link(const Tensor& a, const Tensor& b) {
  std::vector<Label> s = shared_labels(a, b);
  if (s.size() != 1) throw ShapeError("chain neighbors must share exactly one label");
  return s[0];
}

std::vector<Label> all_but(const Tensor& t, const std::vector<Label>& drop) {
  std::vector<Label> out;
  for (Label l : t.labels())
    if (std::find(drop.begin(), drop.end(), l) == drop.end()) out.push_back(l);
  return out;
}

struct Links {
  std::vector<Label> mps, mpo;  // link k joins sites k and k+1
};

Links links_of(const MpoMps& p) {
  validate(p);
  Links l;
  for (std::size_t k = 0; k + 1 < p.mps.size(); ++k) {
    l.mps.push_back(link(p.mps[k], p.mps[k + 1]));
    l.mpo.push_back(link(p.mpo[k], p.mpo[k + 1]));
  }
  return l;
}

}  // namespace

void validate(const MpoMps& p) {
  const std::size_t n = p.mps.size();
  if (n == 0 || p.mpo.size() != n) throw ShapeError("MPO and MPS must have the same nonzero length");
  for (std::size_t k = 0; k < n; ++k) {
    if (k + 1 < n) {
      link(p.mps[k], p.mps[k + 1]);
      link(p.mpo[k], p.mpo[k + 1]);
    }
    std::vector<Label> s = shared_labels(p.mpo[k], p.mps[k]);
    if (s.empty()) throw ShapeError("MPO site shares no label with its MPS site");
    for (Label l : s)
      if (p.mpo[k].dim(l) != p.mps[k].dim(l)) throw ShapeError("MPO/MPS physical size mismatch");
    for (std::size_t j = 0; j < n; ++j)
      if (j != k && !shared_labels(p.mpo[k], p.mps[j]).empty())
        throw ShapeError("MPO site shares a label with a non-matching MPS site");
  }
}

Chain mpo_mps_zipup(const MpoMps& p, Dim chi) {
  Links l = links_of(p);
  const std::size_t n = p.mps.size();
  Chain out;
  Tensor carry;
  for (std::size_t k = 0; k < n; ++k) {
    Tensor t = k == 0 ? contract(p.mps[0], p.mpo[0]) : contract(contract(carry, p.mps[k]), p.mpo[k]);
    if (k + 1 == n) {
      out.push_back(std::move(t));
      break;
    }
    Matricized m = matricize(t, all_but(t, {l.mps[k], l.mpo[k]}));
    FactorResult f = truncated_factor(m.m, chi);
    const Label b = fresh_label();
    const Dim r = f.u.cols();
    out.push_back(tensorize(f.u, m.row_labels, m.row_dims, {b}, {r}));
    carry = tensorize(f.s, {b}, {r}, m.col_labels, m.col_dims);
  }
  return out;
}

Chain mpo_mps_fullenv(const MpoMps& p, Dim chi) {
  validate(p);
  TreeTensorNetwork t;
  const int n = p.mps.size();
  for (int k = 0; k < n; ++k) t.net.put(k, contract(p.mps[k], p.mpo[k]));
  t.root = n - 1;
  TreeTensorNetwork r = truncate_tree_canonical(t, chi);
  Chain out;
  for (int k = 0; k < n; ++k) out.push_back(r.net.at(k));
  return out;
}

Chain mpo_mps_dm(const MpoMps& p, Dim chi) {
  Links l = links_of(p);
  const std::size_t n = p.mps.size();
  std::set<Label> links(l.mps.begin(), l.mps.end());
  links.insert(l.mpo.begin(), l.mpo.end());
  // External legs are traced in environments; everything else gets a bra copy.
  auto bra_env = [&](const Tensor& t, const Tensor& partner) {
    std::map<Label, Label> m;
    for (Label x : t.labels())
      if (links.count(x) || partner.has(x)) m[x] = bra_label(x);
    return t.relabeled(m);
  };
  auto bra_all = [](const Tensor& t) {
    std::map<Label, Label> m;
    for (Label x : t.labels()) m[x] = bra_label(x);
    return t.relabeled(m);
  };

  // env[k]: sites k..n-1 squared, open on links k-1.
  std::vector<Tensor> env(n + 1);
  for (std::size_t k = n; k-- > 1;) {
    const Tensor& a = p.mps[k];
    const Tensor& o = p.mpo[k];
    Tensor x = k + 1 == n ? a : contract(env[k + 1], a);
    x = contract(x, o);
    x = contract(x, bra_env(o, a));
    x = contract(x, bra_env(a, o));
    env[k] = std::move(x);
  }

  Chain out;
  Tensor carry;
  for (std::size_t k = 0; k < n; ++k) {
    Tensor y = k == 0 ? contract(p.mps[0], p.mpo[0]) : contract(contract(carry, p.mps[k]), p.mpo[k]);
    if (k + 1 == n) {
      out.push_back(std::move(y));
      break;
    }
    std::vector<Label> rows = all_but(y, {l.mps[k], l.mpo[k]});
    std::vector<Dim> dims;
    for (Label x : rows) dims.push_back(y.dim(x));
    Tensor rho = contract(contract(y, env[k + 1]), bra_all(y));
    Matrix u = truncated_eig(paired_matrix(rho, rows), chi).u;
    const Label b = fresh_label();
    Tensor ut = tensorize(u, rows, dims, {b}, {static_cast<Dim>(u.cols())});
    carry = contract(ut, y);
    out.push_back(std::move(ut));
  }
  return out;
}

Tensor contract_chain(const Chain& c) { return contract_all(c); }

Tensor exact_product(const MpoMps& p) {
  std::vector<Tensor> ts = p.mps;
  ts.insert(ts.end(), p.mpo.begin(), p.mpo.end());
  return contract_all(std::move(ts));
}

MpoMps random_mpo_mps(int n, Dim s, Dim a, Dim r, std::uint64_t seed, bool boundary_legs) {
  if (n < 1) throw ShapeError("chain length must be positive");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  auto fill = [&](std::vector<Label> ls, std::vector<Dim> ds) {
    Tensor t(std::move(ls), std::move(ds));
    for (double& x : t.data()) x = dist(rng);
    return t;
  };
  Label next = 1;
  std::vector<Label> phys(n), out(n), mps_link(n), mpo_link(n);
  for (int k = 0; k < n; ++k) {
    phys[k] = next++;
    out[k] = next++;
    mps_link[k] = next++;
    mpo_link[k] = next++;
  }
  const Label left_leg = next++;
  MpoMps p;
  for (int k = 0; k < n; ++k) {
    std::vector<Label> ls;
    std::vector<Dim> ds;
    if (k > 0) {
      ls.push_back(mps_link[k - 1]);
      ds.push_back(r);
    } else if (boundary_legs) {
      ls.push_back(left_leg);
      ds.push_back(r);
    }
    ls.push_back(phys[k]);
    ds.push_back(s);
    if (k + 1 < n || boundary_legs) {
      ls.push_back(mps_link[k]);
      ds.push_back(r);
    }
    p.mps.push_back(fill(ls, ds));
  }
  for (int k = 0; k < n; ++k) {
    std::vector<Label> ls;
    std::vector<Dim> ds;
    if (k > 0) {
      ls.push_back(mpo_link[k - 1]);
      ds.push_back(a);
    }
    ls.push_back(phys[k]);
    ds.push_back(s);
    ls.push_back(out[k]);
    ds.push_back(s);
    if (k + 1 < n || boundary_legs) {
      ls.push_back(mpo_link[k]);
      ds.push_back(a);
    }
    p.mpo.push_back(fill(ls, ds));
  }
  return p;
}

MpoMps with_identity_mpo(const Chain& mps, const std::vector<Label>& phys) {
  if (mps.size() != phys.size()) throw ShapeError("one physical label per site required");
  MpoMps p;
  p.mps = mps;
  const std::size_t n = mps.size();
  std::vector<Label> links(n);
  for (auto& x : links) x = fresh_label();
  for (std::size_t k = 0; k < n; ++k) {
    const Dim d = mps[k].dim(phys[k]);
    std::vector<Label> ls;
    std::vector<Dim> ds;
    if (k > 0) {
      ls.push_back(links[k - 1]);
      ds.push_back(1);
    }
    ls.push_back(phys[k]);
    ds.push_back(d);
    ls.push_back(fresh_label());
    ds.push_back(d);
    if (k + 1 < n) {
      ls.push_back(links[k]);
      ds.push_back(1);
    }
    Tensor t(ls, ds);
    for (Dim i = 0; i < d; ++i) t.data()[i * d + i] = 1.0;
    p.mpo.push_back(std::move(t));
  }
  return p;
}

}  // namespace ptn
