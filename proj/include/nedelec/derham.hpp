#pragma once

#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "interp.hpp"
#include "linalg.hpp"
#include "localspace.hpp"
#include "polynomial.hpp"
#include "simplex.hpp"

namespace nedelec {

using Basis = std::vector<VectorPolynomial>;

inline Basis as_basis(const std::vector<Polynomial>& ps) {
  Basis out;
  for (const auto& p : ps) out.push_back(detail::as_field(p));
  return out;
}

/// Matrix of a linear map between two spaces, in their bases: column j holds
/// the coordinates of op(src[j]) in dst.
struct OperatorMatrix {
  std::string name;
  Matrix matrix;
};

inline OperatorMatrix operator_matrix(std::string name, const Basis& src, const Basis& dst,
                                      const std::function<VectorPolynomial(const VectorPolynomial&)>& op) {
  OperatorMatrix out{std::move(name), Matrix(int(dst.size()), int(src.size()))};
  if (src.empty() || dst.empty()) {
    for (const auto& s : src)
      if (!op(s).is_zero()) throw std::domain_error(out.name + ": image is not contained in the target space");
    return out;
  }
  Basis images;
  for (const auto& s : src) images.push_back(op(s));
  int degree = max_degree(std::span<const VectorPolynomial>(dst));
  for (const auto& im : images) degree = std::max(degree, im.degree());
  const CoefficientLayout lay(dst[0].dim(), dst[0].size(), std::max(degree, 0));
  const SpanCoordinates coords(lay.matrix(std::span<const VectorPolynomial>(dst)));
  for (int j = 0; j < int(images.size()); ++j) {
    if (images[j].size() != dst[0].size()) throw std::domain_error(out.name + ": component count mismatch");
    auto c = coords.coordinates(lay.vectorize(images[j]));
    if (!c) throw std::domain_error(out.name + ": image is not contained in the target space");
    for (int i = 0; i < int(c->size()); ++i) out.matrix(i, j) = (*c)[i];
  }
  return out;
}

/// One named identity checked exactly.
struct SequenceCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Ranks and exactness of one row 0 -> V_0 -> V_1 -> ... -> V_n -> 0.
struct RowReport {
  std::string name;
  std::vector<std::string> spaces;
  std::vector<int> dims;
  std::vector<std::string> maps;
  std::vector<int> ranks;                ///< rank of each map
  std::vector<bool> composition_zero;    ///< maps[k+1] o maps[k] == 0
  std::vector<bool> exact;               ///< per space: ker(out) == im(in)
  int alternating_sum = 0;

  bool ok() const {
    for (bool b : composition_zero)
      if (!b) return false;
    for (bool b : exact)
      if (!b) return false;
    return alternating_sum == 0;
  }
};

/// Builds the report of a row. `leading` is the dimension of the kernel the
/// row starts from (1 for the constants, 0 for zero-trace rows). Maps go
/// between consecutive spaces; the last space maps to zero.
inline RowReport analyze_row(std::string name, std::vector<std::string> spaces, std::vector<int> dims,
                             std::vector<OperatorMatrix> maps, int leading) {
  RowReport r;
  r.name = std::move(name);
  r.spaces = std::move(spaces);
  r.dims = std::move(dims);
  for (const auto& m : maps) {
    r.maps.push_back(m.name);
    r.ranks.push_back(rank(m.matrix));
  }
  for (std::size_t k = 0; k + 1 < maps.size(); ++k) {
    const auto& a = maps[k].matrix;
    const auto& b = maps[k + 1].matrix;
    r.composition_zero.push_back(a.cols() == 0 || b.rows() == 0 || (b * a).is_zero());
  }
  const int n = int(r.dims.size());
  for (int k = 0; k < n; ++k) {
    const int in = k == 0 ? leading : r.ranks[k - 1];
    const int out = k < int(r.ranks.size()) ? r.ranks[k] : 0;
    r.exact.push_back(r.dims[k] - out == in);
  }
  int s = leading;
  for (int k = 0; k < n; ++k) s += (k % 2 ? 1 : -1) * r.dims[k];
  r.alternating_sum = leading ? s : -s;
  return r;
}

struct SequenceReport {
  int p = 0;
  std::string element;
  std::vector<RowReport> rows;
  std::vector<SequenceCheck> checks;

  bool ok() const {
    for (const auto& r : rows)
      if (!r.ok()) return false;
    for (const auto& c : checks)
      if (!c.passed) return false;
    return true;
  }

  std::vector<std::string> failures() const {
    std::vector<std::string> out;
    for (const auto& r : rows) {
      for (std::size_t k = 0; k < r.composition_zero.size(); ++k)
        if (!r.composition_zero[k]) out.push_back(r.name + ": " + r.maps[k + 1] + " o " + r.maps[k] + " != 0");
      for (std::size_t k = 0; k < r.exact.size(); ++k)
        if (!r.exact[k]) out.push_back(r.name + ": not exact at " + r.spaces[k]);
      if (r.alternating_sum != 0) out.push_back(r.name + ": alternating dimension sum " + std::to_string(r.alternating_sum));
    }
    for (const auto& c : checks)
      if (!c.passed) out.push_back(c.name + (c.detail.empty() ? "" : ": " + c.detail));
    return out;
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["p"] = p;
    j["element"] = element;
    j["ok"] = ok();
    for (const auto& r : rows) {
      nlohmann::json jr;
      jr["name"] = r.name;
      jr["spaces"] = r.spaces;
      jr["dims"] = r.dims;
      jr["maps"] = r.maps;
      jr["ranks"] = r.ranks;
      jr["composition_zero"] = r.composition_zero;
      jr["exact"] = r.exact;
      jr["alternating_sum"] = r.alternating_sum;
      j["rows"].push_back(jr);
    }
    for (const auto& c : checks) j["checks"].push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
    j["failures"] = failures();
    return j;
  }
};

namespace detail {

inline VectorPolynomial op_grad(const VectorPolynomial& u) { return grad(u[0]); }
inline VectorPolynomial op_curl(const VectorPolynomial& u) { return curl(u); }
inline VectorPolynomial op_div(const VectorPolynomial& u) { return as_field(div(u)); }
inline VectorPolynomial op_curl2d(const VectorPolynomial& u) { return curl2d(u[0]); }
inline VectorPolynomial op_div2d(const VectorPolynomial& u) { return as_field(div2d(u)); }
inline VectorPolynomial op_dt(const VectorPolynomial& u) { return as_field(u[0].derivative(0)); }

inline std::string element_label(const Simplex& t) {
  return t == Simplex::reference(3) ? "reference" : "physical";
}

}  // namespace detail

/// Full local sequence on T with face and edge rows and the trace commuting
/// identities, all by exact rank computations.
inline SequenceReport verify_local_sequence(const Simplex& t, int p) {
  SequenceReport rep;
  rep.p = p;
  rep.element = detail::element_label(t);
  // volume row
  {
    const Basis h1 = as_basis(scalar_monomials(3, p + 1));
    const Basis w1 = build_W1(t, p).basis;
    const Basis w2 = build_W2(t, p).basis;
    const Basis l2 = as_basis(scalar_monomials(3, p));
    rep.rows.push_back(analyze_row(
        "volume", {"P_{p+1}(T)", "W1_p(T)", "W2_p(T)", "P_p(T)"},
        {int(h1.size()), int(w1.size()), int(w2.size()), int(l2.size())},
        {operator_matrix("grad", h1, w1, detail::op_grad), operator_matrix("curl", w1, w2, detail::op_curl),
         operator_matrix("div", w2, l2, detail::op_div)},
        1));
  }
  // face row on the reference triangle
  {
    const Basis h1 = as_basis(scalar_monomials(2, p + 1));
    const Basis w1 = build_W1_face(p);
    const Basis l2 = as_basis(scalar_monomials(2, p));
    rep.rows.push_back(analyze_row("face", {"P_{p+1}(f)", "W1_p(f)", "P_p(f)"},
                                   {int(h1.size()), int(w1.size()), int(l2.size())},
                                   {operator_matrix("curl2d", h1, w1, detail::op_curl2d),
                                    operator_matrix("div2d", w1, l2, detail::op_div2d)},
                                   1));
  }
  // edge row
  {
    const Basis h1 = as_basis(scalar_monomials(1, p + 1));
    const Basis l2 = as_basis(scalar_monomials(1, p));
    rep.rows.push_back(analyze_row("edge", {"P_{p+1}(e)", "P_p(e)"}, {int(h1.size()), int(l2.size())},
                                   {operator_matrix("d/dt", h1, l2, detail::op_dt)}, 1));
  }
  // commuting identities between traces and derivatives, on spanning sets
  auto check = [&](const std::string& name, auto&& test) {
    SequenceCheck c{name, true, ""};
    try {
      c.passed = test();
    } catch (const std::exception& e) {
      c.passed = false;
      c.detail = e.what();
    }
    rep.checks.push_back(c);
  };
  const auto h1 = scalar_monomials(3, p + 1);
  const auto w1 = build_W1(t, p).basis;
  check("face trace of grad = curl2d of restriction", [&] {
    for (int f = 0; f < 4; ++f)
      for (const auto& q : h1)
        if (tangential_trace_face(grad(q), t.face(f)) != curl2d(pullback(q, t.face(f)))) return false;
    return true;
  });
  check("edge trace of grad = d/dt of restriction", [&] {
    for (int e = 0; e < 6; ++e)
      for (const auto& q : h1)
        if (tangential_trace_edge(grad(q), t.edge(e)) != pullback(q, t.edge(e)).derivative(0)) return false;
    return true;
  });
  check("normal trace of curl = div2d of face trace", [&] {
    for (int f = 0; f < 4; ++f)
      for (const auto& u : w1)
        if (normal_trace_face(curl(u), t.face(f)) != div2d(tangential_trace_face(u, t.face(f)))) return false;
    return true;
  });
  check("face-edge normal trace of face trace = edge trace", [&] {
    const Simplex tri = Simplex::reference(2);
    for (int f = 0; f < 4; ++f)
      for (int k = 0; k < 3; ++k) {
        const int e = kTetFaceEdges[f][k];
        for (const auto& u : w1)
          if (normal_trace_edge2d(tangential_trace_face(u, t.face(f)), tri.facet(kTriangleEdges[k])) !=
              tangential_trace_edge(u, t.edge(e)))
            return false;
      }
    return true;
  });
  check("face traces lie in W1_p(f)", [&] {
    const auto wf = build_W1_face(p);
    for (int f = 0; f < 4; ++f) {
      Basis tr;
      for (const auto& u : w1) tr.push_back(tangential_trace_face(u, t.face(f)));
      if (!same_span<VectorPolynomial>(tr, wf)) return false;
    }
    return true;
  });
  check("edge traces span P_p(e)", [&] {
    const auto pe = scalar_monomials(1, p);
    for (int e = 0; e < 6; ++e) {
      std::vector<Polynomial> tr;
      for (const auto& u : w1) tr.push_back(tangential_trace_edge(u, t.edge(e)));
      if (!same_span<Polynomial>(tr, pe)) return false;
    }
    return true;
  });
  return rep;
}

/// Zero-trace sequences 0 -> P0_{p+1} -> W1_0 -> W2_0 -> P_p mean-free -> 0 on
/// T and the corresponding face and edge rows, together with the liftings
/// acting as right inverses at each stage.
inline SequenceReport verify_zero_trace_sequence(const Simplex& t, int p) {
  SequenceReport rep;
  rep.p = p;
  rep.element = detail::element_label(t);
  LocalInterpolator li(t, p);
  const Basis h1 = as_basis(zero_trace_scalar(t, p + 1));
  const LocalSpace w1s = build_W1(t, p);
  const Basis w1 = zero_trace_W1(w1s);
  const Basis w2 = zero_trace_W2(build_W2(t, p));
  const Basis l2 = as_basis(zero_mean_scalar(t, p));
  rep.rows.push_back(analyze_row("volume", {"P0_{p+1}(T)", "W1_0(T)", "W2_0(T)", "Pmean_p(T)"},
                                 {int(h1.size()), int(w1.size()), int(w2.size()), int(l2.size())},
                                 {operator_matrix("grad", h1, w1, detail::op_grad),
                                  operator_matrix("curl", w1, w2, detail::op_curl),
                                  operator_matrix("div", w2, l2, detail::op_div)},
                                 0));
  const Basis fh1 = as_basis(zero_trace_scalar(2, p + 1));
  const Basis fw1 = zero_trace_W1_face(p);
  const Basis fl2 = as_basis(zero_mean_scalar(2, p));
  rep.rows.push_back(analyze_row("face", {"P0_{p+1}(f)", "W1_0(f)", "Pmean_p(f)"},
                                 {int(fh1.size()), int(fw1.size()), int(fl2.size())},
                                 {operator_matrix("curl2d", fh1, fw1, detail::op_curl2d),
                                  operator_matrix("div2d", fw1, fl2, detail::op_div2d)},
                                 0));
  const Basis eh1 = as_basis(zero_trace_scalar(1, p + 1));
  const Basis el2 = as_basis(zero_trace_W1_edge(p));
  rep.rows.push_back(analyze_row("edge", {"P0_{p+1}(e)", "Pmean_p(e)"}, {int(eh1.size()), int(el2.size())},
                                 {operator_matrix("d/dt", eh1, el2, detail::op_dt)}, 0));

  auto check = [&](const std::string& name, auto&& test) {
    SequenceCheck c{name, true, ""};
    try {
      c.passed = test();
    } catch (const std::exception& e) {
      c.passed = false;
      c.detail = e.what();
    }
    rep.checks.push_back(c);
  };
  check("edge lifting inverts d/dt", [&] {
    for (const auto& q : el2)
      if (li.lift_L1_edge(q[0]).derivative(0) != q[0]) return false;
    return true;
  });
  check("face liftings invert curl2d and div2d", [&] {
    for (const auto& q : fh1)
      if (li.lift_L1_face(curl2d(q[0])) != q[0]) return false;
    for (const auto& q : fl2)
      if (div2d(li.lift_L2_face(q[0])) != q[0]) return false;
    return true;
  });
  check("cell liftings invert grad, curl and div", [&] {
    for (const auto& q : h1)
      if (li.lift_L1_cell(grad(q[0])) != q[0]) return false;
    for (const auto& w : w1) {
      const auto c = curl(w);
      if (curl(li.lift_L2_cell(c)) != c) return false;
    }
    for (const auto& q : l2)
      if (div(li.lift_L3_cell(q[0])) != q[0]) return false;
    return true;
  });
  return rep;
}

}  // namespace nedelec
