#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "linalg.hpp"
#include "localspace.hpp"
#include "rational.hpp"
#include "simplex.hpp"

namespace nedelec {

/// Tetrahedral mesh with exact vertex coordinates. Each tet stores its
/// vertices in ascending global order, so local edges and faces inherit the
/// global orientation (edges point from lower to higher index, faces are
/// keyed by sorted triples).
///
/// `scale` is a floating length factor applied only when matrices are
/// converted to floating point; it lets irrational domains such as (0, pi)^3
/// reuse exact unit-cube geometry.
class Mesh {
 public:
  Mesh() = default;
  Mesh(std::vector<Point> vertices, std::vector<std::array<int, 4>> tets, std::vector<int> region = {},
       double scale = 1.0)
      : vertices_(std::move(vertices)), tets_(std::move(tets)), region_(std::move(region)), scale_(scale) {
    if (region_.empty()) region_.assign(tets_.size(), 0);
    if (region_.size() != tets_.size()) throw std::invalid_argument("Mesh: region column length mismatch");
    if (!(scale_ > 0) || !std::isfinite(scale_)) throw std::invalid_argument("Mesh: scale must be positive");
    for (auto& t : tets_) {
      for (int v : t)
        if (v < 0 || v >= int(vertices_.size())) throw std::out_of_range("Mesh: vertex index out of range");
      std::sort(t.begin(), t.end());
      if (std::adjacent_find(t.begin(), t.end()) != t.end()) throw std::invalid_argument("Mesh: repeated vertex in tet");
    }
    for (const auto& v : vertices_)
      if (v.size() != 3) throw std::invalid_argument("Mesh: vertices need 3 coordinates");
    for (int t = 0; t < num_tets(); ++t)
      if (element(t).det_jacobian() == 0) throw std::domain_error("Mesh: degenerate tetrahedron " + std::to_string(t));
    build_topology();
  }

  int num_vertices() const { return int(vertices_.size()); }
  int num_tets() const { return int(tets_.size()); }
  int num_edges() const { return int(edges_.size()); }
  int num_faces() const { return int(faces_.size()); }
  double scale() const { return scale_; }

  const std::vector<Point>& vertices() const { return vertices_; }
  const std::array<int, 4>& tet(int t) const { return tets_.at(t); }
  int region(int t) const { return region_.at(t); }
  const std::array<int, 2>& edge(int e) const { return edges_.at(e); }
  const std::array<int, 3>& face(int f) const { return faces_.at(f); }
  /// Global edge index of local edge le of tet t.
  int tet_edge(int t, int le) const { return tet_edges_.at(t)[le]; }
  int tet_face(int t, int lf) const { return tet_faces_.at(t)[lf]; }
  bool boundary_edge(int e) const { return boundary_edge_.at(e); }
  bool boundary_face(int f) const { return boundary_face_.at(f); }
  bool boundary_vertex(int v) const { return boundary_vertex_.at(v); }
  /// Tets adjacent to a face (one or two).
  const std::vector<int>& face_tets(int f) const { return face_tets_.at(f); }

  Simplex element(int t) const {
    std::vector<Point> v;
    for (int i : tets_.at(t)) v.push_back(vertices_[i]);
    return Simplex(std::move(v));
  }

  Rational volume() const {
    Rational v = 0;
    for (int t = 0; t < num_tets(); ++t) v += element(t).volume();
    return v;
  }

 private:
  void build_topology() {
    std::map<std::array<int, 2>, int> edge_id;
    std::map<std::array<int, 3>, int> face_id;
    for (const auto& t : tets_) {
      std::array<int, 6> te{};
      std::array<int, 4> tf{};
      for (int le = 0; le < 6; ++le) {
        std::array<int, 2> key{t[kTetEdges[le][0]], t[kTetEdges[le][1]]};
        auto [it, inserted] = edge_id.try_emplace(key, int(edges_.size()));
        if (inserted) edges_.push_back(key);
        te[le] = it->second;
      }
      for (int lf = 0; lf < 4; ++lf) {
        std::array<int, 3> key{t[kTetFaces[lf][0]], t[kTetFaces[lf][1]], t[kTetFaces[lf][2]]};
        auto [it, inserted] = face_id.try_emplace(key, int(faces_.size()));
        if (inserted) {
          faces_.push_back(key);
          face_tets_.emplace_back();
        }
        tf[lf] = it->second;
        face_tets_[it->second].push_back(int(tet_edges_.size()));
      }
      tet_edges_.push_back(te);
      tet_faces_.push_back(tf);
    }
    boundary_face_.assign(faces_.size(), false);
    boundary_edge_.assign(edges_.size(), false);
    boundary_vertex_.assign(vertices_.size(), false);
    for (int f = 0; f < num_faces(); ++f) {
      const auto n = face_tets_[f].size();
      if (n > 2) throw std::invalid_argument("Mesh: face shared by more than two tets");
      if (n == 1) {
        boundary_face_[f] = true;
        const auto& v = faces_[f];
        for (int k = 0; k < 3; ++k) boundary_vertex_[v[k]] = true;
        for (const auto& le : kTriangleEdges) boundary_edge_[edge_id.at({v[le[0]], v[le[1]]})] = true;
      }
    }
  }

  std::vector<Point> vertices_;
  std::vector<std::array<int, 4>> tets_;
  std::vector<int> region_;
  double scale_ = 1.0;
  std::vector<std::array<int, 2>> edges_;
  std::vector<std::array<int, 3>> faces_;
  std::vector<std::array<int, 6>> tet_edges_;
  std::vector<std::array<int, 4>> tet_faces_;
  std::vector<std::vector<int>> face_tets_;
  std::vector<bool> boundary_edge_, boundary_face_, boundary_vertex_;
};

// Generators ---------------------------------------------------------------------

inline Mesh reference_tet_mesh() {
  return Mesh({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}}, {{0, 1, 2, 3}});
}

/// n^3 unit-cube cells, each split into the 6 Kuhn tetrahedra around the
/// main diagonal. Coordinates are multiples of 1/n; `scale` stretches the
/// result to (0, scale)^3 at floating conversion time.
inline Mesh cube_grid(int n, double scale = 1.0) {
  if (n < 1) throw std::invalid_argument("cube_grid: n must be >= 1");
  auto id = [n](int i, int j, int k) { return i + (n + 1) * (j + (n + 1) * k); };
  std::vector<Point> v;
  for (int k = 0; k <= n; ++k)
    for (int j = 0; j <= n; ++j)
      for (int i = 0; i <= n; ++i) v.push_back({Rational(i, n), Rational(j, n), Rational(k, n)});
  for (auto& p : v)
    for (auto& c : p) c.canonicalize();
  static constexpr std::array<std::array<int, 3>, 6> perms{
      {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
  std::vector<std::array<int, 4>> tets;
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i)
        for (const auto& perm : perms) {
          std::array<int, 3> c{i, j, k};
          std::array<int, 4> t{};
          t[0] = id(c[0], c[1], c[2]);
          for (int s = 0; s < 3; ++s) {
            c[perm[s]] += 1;
            t[s + 1] = id(c[0], c[1], c[2]);
          }
          tets.push_back(t);
        }
  return Mesh(std::move(v), std::move(tets), {}, scale);
}

inline Mesh cube6(double scale = 1.0) { return cube_grid(1, scale); }

// Text IO ------------------------------------------------------------------------

inline Mesh read_mesh(std::istream& in, double scale = 1.0) {
  std::string line;
  auto next_line = [&]() -> std::string {
    while (std::getline(in, line)) {
      auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      if (line.find_first_not_of(" \t\r") != std::string::npos) return line;
    }
    throw std::runtime_error("read_mesh: unexpected end of input");
  };
  int nv = 0, nt = 0;
  {
    std::istringstream h(next_line());
    if (!(h >> nv >> nt) || nv < 4 || nt < 1) throw std::runtime_error("read_mesh: bad header, expected 'nv nt'");
  }
  std::vector<Point> v;
  for (int i = 0; i < nv; ++i) {
    std::istringstream s(next_line());
    std::string a, b, c;
    if (!(s >> a >> b >> c)) throw std::runtime_error("read_mesh: vertex line " + std::to_string(i) + " needs 3 coordinates");
    v.push_back({parse_rational(a), parse_rational(b), parse_rational(c)});
  }
  std::vector<std::array<int, 4>> t;
  std::vector<int> region;
  for (int i = 0; i < nt; ++i) {
    std::istringstream s(next_line());
    std::array<int, 4> q{};
    if (!(s >> q[0] >> q[1] >> q[2] >> q[3])) throw std::runtime_error("read_mesh: tet line " + std::to_string(i) + " needs 4 indices");
    int r = 0;
    if (!(s >> r)) r = 0;
    t.push_back(q);
    region.push_back(r);
  }
  return Mesh(std::move(v), std::move(t), std::move(region), scale);
}

inline Mesh read_mesh_file(const std::string& path, double scale = 1.0) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("read_mesh: cannot open '" + path + "'");
  return read_mesh(f, scale);
}

/// Decimal text for terminating fractions, "a/b" otherwise (both read back exactly).
inline std::string format_coordinate(const Rational& q) {
  mpz_class d = q.get_den();
  int twos = 0, fives = 0;
  while (mpz_divisible_ui_p(d.get_mpz_t(), 2)) d /= 2, ++twos;
  while (mpz_divisible_ui_p(d.get_mpz_t(), 5)) d /= 5, ++fives;
  if (d != 1) return q.get_str();
  const int digits = std::max(twos, fives);
  mpz_class ten = 10, scale;
  mpz_pow_ui(scale.get_mpz_t(), ten.get_mpz_t(), digits);
  mpz_class n = q.get_num() * scale / q.get_den();
  const bool neg = n < 0;
  if (neg) n = -n;
  std::string s = n.get_str();
  if (digits > 0) {
    if (int(s.size()) <= digits) s = std::string(digits - s.size() + 1, '0') + s;
    s.insert(s.size() - digits, ".");
  }
  return neg ? "-" + s : s;
}

inline void write_mesh(std::ostream& out, const Mesh& m, bool with_region = false) {
  out << m.num_vertices() << " " << m.num_tets() << "\n";
  for (const auto& v : m.vertices())
    out << format_coordinate(v[0]) << " " << format_coordinate(v[1]) << " " << format_coordinate(v[2]) << "\n";
  for (int t = 0; t < m.num_tets(); ++t) {
    const auto& q = m.tet(t);
    out << q[0] << " " << q[1] << " " << q[2] << " " << q[3];
    if (with_region) out << " " << m.region(t);
    out << "\n";
  }
}

// Global dofs --------------------------------------------------------------------

enum class BoundaryCondition { None, Dirichlet };

inline const char* to_string(BoundaryCondition bc) { return bc == BoundaryCondition::None ? "none" : "dirichlet"; }

/// Local-to-global dof correspondence. Dofs are numbered edge block first
/// (by global edge), then faces, then cells. Removed (Dirichlet) dofs map to -1.
struct GlobalDofMap {
  int p = 0;
  BoundaryCondition bc = BoundaryCondition::None;
  int num_dofs = 0;
  int edge_dofs = 0, face_dofs = 0, cell_dofs = 0;
  std::vector<std::vector<int>> local_to_global;
  /// Orientation signs. Sorted tet vertices make every local facet agree with
  /// its global orientation, so these are all +1.
  std::vector<std::vector<int>> sign;
};

inline GlobalDofMap build_dofmap(const Mesh& m, int p, BoundaryCondition bc = BoundaryCondition::None) {
  if (p < 0) throw std::invalid_argument("build_dofmap: p must be >= 0");
  GlobalDofMap d;
  d.p = p;
  d.bc = bc;
  const bool dir = bc == BoundaryCondition::Dirichlet;
  const int ne = dofs_per_edge(p), nf = dofs_per_face(p), nc = dofs_per_cell(p);
  std::vector<int> edge_start(m.num_edges(), -1), face_start(m.num_faces(), -1);
  int n = 0;
  for (int e = 0; e < m.num_edges(); ++e)
    if (!(dir && m.boundary_edge(e))) edge_start[e] = n, n += ne;
  d.edge_dofs = n;
  for (int f = 0; f < m.num_faces(); ++f)
    if (!(dir && m.boundary_face(f))) face_start[f] = n, n += nf;
  d.face_dofs = n - d.edge_dofs;
  const int cell_begin = n;
  n += nc * m.num_tets();
  d.cell_dofs = n - cell_begin;
  d.num_dofs = n;
  const auto part = dof_partition(p);
  for (int t = 0; t < m.num_tets(); ++t) {
    std::vector<int> l2g(dim_W1(p), -1);
    for (const auto& blk : part)
      for (int k = 0; k < blk.size(); ++k) {
        int g = -1;
        if (blk.kind == FacetKind::Edge) {
          const int s = edge_start[m.tet_edge(t, blk.index)];
          if (s >= 0) g = s + k;
        } else if (blk.kind == FacetKind::Face) {
          const int s = face_start[m.tet_face(t, blk.index)];
          if (s >= 0) g = s + k;
        } else {
          g = cell_begin + t * nc + k;
        }
        l2g[blk.begin + k] = g;
      }
    d.local_to_global.push_back(std::move(l2g));
    d.sign.emplace_back(dim_W1(p), 1);
  }
  return d;
}

/// Dimension of the discrete gradient space grad(Lagrange P_{p+1}) on a
/// contractible mesh: the Lagrange dof count minus constants, or the
/// interior Lagrange dof count under Dirichlet conditions.
inline int discrete_gradient_dim(const Mesh& m, int p, BoundaryCondition bc) {
  const int k = p + 1;
  const int per_edge = k - 1, per_face = (k - 1) * (k - 2) / 2, per_cell = (k - 1) * (k - 2) * (k - 3) / 6;
  if (bc == BoundaryCondition::None)
    return m.num_vertices() + per_edge * m.num_edges() + per_face * m.num_faces() + per_cell * m.num_tets() - 1;
  int nv = 0, ne = 0, nf = 0;
  for (int v = 0; v < m.num_vertices(); ++v) nv += !m.boundary_vertex(v);
  for (int e = 0; e < m.num_edges(); ++e) ne += !m.boundary_edge(e);
  for (int f = 0; f < m.num_faces(); ++f) nf += !m.boundary_face(f);
  return nv + per_edge * ne + per_face * nf + per_cell * m.num_tets();
}

// Materials ----------------------------------------------------------------------

/// Piecewise-constant symmetric positive definite tensors per region.
class MaterialSpec {
 public:
  MaterialSpec() = default;

  static Matrix identity() { return Matrix::identity(3); }
  static Matrix diagonal(const Rational& a, const Rational& b, const Rational& c) {
    Matrix m(3, 3);
    m(0, 0) = a, m(1, 1) = b, m(2, 2) = c;
    return m;
  }

  void set_epsilon(int region, const Matrix& e) { eps_[region] = checked(e); }
  void set_mu(int region, const Matrix& m) { mu_[region] = checked(m); }
  /// Applies to every region without a specific entry.
  void set_default_epsilon(const Matrix& e) { eps_default_ = checked(e); }
  void set_default_mu(const Matrix& m) { mu_default_ = checked(m); }

  const Matrix& epsilon(int region) const {
    auto it = eps_.find(region);
    return it == eps_.end() ? eps_default_ : it->second;
  }
  const Matrix& mu(int region) const {
    auto it = mu_.find(region);
    return it == mu_.end() ? mu_default_ : it->second;
  }
  bool is_identity() const {
    return eps_.empty() && mu_.empty() && eps_default_ == identity() && mu_default_ == identity();
  }

  /// Exact SPD test: symmetry plus positive leading principal minors.
  static bool is_spd(const Matrix& m) {
    if (m.rows() != 3 || m.cols() != 3) return false;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        if (m(i, j) != m(j, i)) return false;
    const Rational d1 = m(0, 0);
    const Rational d2 = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    const Rational d3 = m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
                        m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
                        m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
    return d1 > 0 && d2 > 0 && d3 > 0;
  }

 private:
  static const Matrix& checked(const Matrix& m) {
    if (!is_spd(m)) throw std::invalid_argument("MaterialSpec: tensor is not symmetric positive definite");
    return m;
  }

  std::map<int, Matrix> eps_, mu_;
  Matrix eps_default_ = identity();
  Matrix mu_default_ = identity();
};

}  // namespace nedelec
