#pragma once

#include <Eigen/Dense>

#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "polynomial.hpp"
#include "rational.hpp"

namespace nedelec {

/// Dense exact rational matrix, row-major.
class Matrix {
 public:
  Matrix() = default;
  Matrix(int rows, int cols) : rows_(rows), cols_(cols), a_(std::size_t(rows) * cols) {}

  static Matrix identity(int n) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1;
    return m;
  }
  static Matrix from_columns(const std::vector<std::vector<Rational>>& cols, int rows) {
    Matrix m(rows, int(cols.size()));
    for (int j = 0; j < m.cols_; ++j) {
      if (int(cols[j].size()) != rows) throw std::invalid_argument("Matrix::from_columns: ragged");
      for (int i = 0; i < rows; ++i) m(i, j) = cols[j][i];
    }
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  Rational& operator()(int i, int j) { return a_[std::size_t(i) * cols_ + j]; }
  const Rational& operator()(int i, int j) const { return a_[std::size_t(i) * cols_ + j]; }

  std::vector<Rational> column(int j) const {
    std::vector<Rational> c(rows_);
    for (int i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
    return c;
  }
  std::vector<Rational> row(int i) const {
    return {a_.begin() + std::size_t(i) * cols_, a_.begin() + std::size_t(i + 1) * cols_};
  }

  Matrix transpose() const {
    Matrix t(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  Matrix select_columns(std::span<const int> idx) const {
    Matrix m(rows_, int(idx.size()));
    for (int i = 0; i < rows_; ++i)
      for (int k = 0; k < int(idx.size()); ++k) m(i, k) = (*this)(i, idx[k]);
    return m;
  }
  Matrix select_rows(std::span<const int> idx) const {
    Matrix m(int(idx.size()), cols_);
    for (int k = 0; k < int(idx.size()); ++k)
      for (int j = 0; j < cols_; ++j) m(k, j) = (*this)(idx[k], j);
    return m;
  }

  bool is_zero() const {
    for (const auto& x : a_)
      if (x != 0) return false;
    return true;
  }

  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols_ != b.rows_) throw std::invalid_argument("Matrix product: shape mismatch");
    Matrix c(a.rows_, b.cols_);
    Rational t;
    for (int i = 0; i < a.rows_; ++i)
      for (int k = 0; k < a.cols_; ++k) {
        const Rational& aik = a(i, k);
        if (aik == 0) continue;
        for (int j = 0; j < b.cols_; ++j) {
          const Rational& bkj = b(k, j);
          if (bkj == 0) continue;
          t = aik * bkj;
          c(i, j) += t;
        }
      }
    return c;
  }
  friend std::vector<Rational> operator*(const Matrix& a, std::span<const Rational> x) {
    if (a.cols_ != int(x.size())) throw std::invalid_argument("Matrix-vector: shape mismatch");
    std::vector<Rational> y(a.rows_);
    for (int i = 0; i < a.rows_; ++i)
      for (int j = 0; j < a.cols_; ++j)
        if (a(i, j) != 0 && x[j] != 0) y[i] += a(i, j) * x[j];
    return y;
  }
  friend Matrix operator+(Matrix a, const Matrix& b) {
    a.same_shape(b);
    for (std::size_t k = 0; k < a.a_.size(); ++k) a.a_[k] += b.a_[k];
    return a;
  }
  friend Matrix operator-(Matrix a, const Matrix& b) {
    a.same_shape(b);
    for (std::size_t k = 0; k < a.a_.size(); ++k) a.a_[k] -= b.a_[k];
    return a;
  }
  friend Matrix operator*(const Rational& s, Matrix a) {
    for (auto& x : a.a_) x *= s;
    return a;
  }
  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.a_ == b.a_;
  }

  Eigen::MatrixXd to_eigen() const {
    Eigen::MatrixXd m(rows_, cols_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) m(i, j) = to_double((*this)(i, j));
    return m;
  }

 private:
  void same_shape(const Matrix& b) const {
    if (rows_ != b.rows_ || cols_ != b.cols_) throw std::invalid_argument("Matrix: shape mismatch");
  }

  int rows_ = 0;
  int cols_ = 0;
  std::vector<Rational> a_;
};

struct Echelon {
  Matrix reduced;           ///< reduced row echelon form
  std::vector<int> pivots;  ///< pivot column of each nonzero row
  int rank() const { return int(pivots.size()); }
};

/// Exact Gauss-Jordan elimination. Pivots are chosen as the nonzero entry with
/// the smallest bit size in the column, which keeps intermediate growth down.
inline Echelon rref(Matrix m) {
  Echelon out;
  const int rows = m.rows(), cols = m.cols();
  int r = 0;
  Rational factor, t;
  for (int c = 0; c < cols && r < rows; ++c) {
    int best = -1;
    std::size_t best_size = 0;
    for (int i = r; i < rows; ++i) {
      const Rational& x = m(i, c);
      if (x == 0) continue;
      std::size_t sz = mpz_sizeinbase(x.get_num_mpz_t(), 2) + mpz_sizeinbase(x.get_den_mpz_t(), 2);
      if (best < 0 || sz < best_size) {
        best = i;
        best_size = sz;
      }
    }
    if (best < 0) continue;
    if (best != r)
      for (int j = 0; j < cols; ++j) std::swap(m(r, j), m(best, j));
    const Rational inv = 1 / m(r, c);
    for (int j = c; j < cols; ++j)
      if (m(r, j) != 0) m(r, j) *= inv;
    for (int i = 0; i < rows; ++i) {
      if (i == r || m(i, c) == 0) continue;
      factor = m(i, c);
      for (int j = c; j < cols; ++j) {
        if (m(r, j) == 0) continue;
        t = factor * m(r, j);
        m(i, j) -= t;
      }
    }
    out.pivots.push_back(c);
    ++r;
  }
  out.reduced = std::move(m);
  return out;
}

inline int rank(const Matrix& m) {
  if (m.rows() == 0 || m.cols() == 0) return 0;
  return m.rows() <= m.cols() ? rref(m).rank() : rref(m.transpose()).rank();
}

/// Indices of a maximal set of linearly independent columns, greedily from the left.
inline std::vector<int> independent_columns(const Matrix& m) { return rref(m).pivots; }

/// Columns form a basis of {x : m x = 0}.
inline Matrix nullspace(const Matrix& m) {
  Echelon e = rref(m);
  std::vector<bool> is_pivot(m.cols(), false);
  for (int p : e.pivots) is_pivot[p] = true;
  std::vector<int> free;
  for (int j = 0; j < m.cols(); ++j)
    if (!is_pivot[j]) free.push_back(j);
  Matrix n(m.cols(), int(free.size()));
  for (int k = 0; k < int(free.size()); ++k) {
    n(free[k], k) = 1;
    for (int r = 0; r < e.rank(); ++r) n(e.pivots[r], k) = -e.reduced(r, free[k]);
  }
  return n;
}

inline Matrix inverse(const Matrix& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("inverse: matrix not square");
  const int n = m.rows();
  Matrix aug(n, 2 * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) aug(i, j) = m(i, j);
    aug(i, n + i) = 1;
  }
  Echelon e = rref(std::move(aug));
  if (e.rank() < n || e.pivots[n - 1] != n - 1) throw std::domain_error("inverse: matrix is singular");
  Matrix inv(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) inv(i, j) = e.reduced(i, n + j);
  return inv;
}

/// Some solution of m x = b, or nullopt when the system is inconsistent.
inline std::optional<std::vector<Rational>> solve(const Matrix& m, std::span<const Rational> b) {
  Matrix aug(m.rows(), m.cols() + 1);
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) aug(i, j) = m(i, j);
    aug(i, m.cols()) = b[i];
  }
  Echelon e = rref(std::move(aug));
  if (e.rank() > 0 && e.pivots.back() == m.cols()) return std::nullopt;
  std::vector<Rational> x(m.cols());
  for (int r = 0; r < e.rank(); ++r) x[e.pivots[r]] = e.reduced(r, m.cols());
  return x;
}

/// Coordinates of vectors with respect to a fixed set of independent columns.
/// The left inverse is built once from a nonsingular row subset.
class SpanCoordinates {
 public:
  SpanCoordinates() = default;
  explicit SpanCoordinates(const Matrix& basis) : basis_(basis) {
    Echelon e = rref(basis.transpose());
    if (e.rank() != basis.cols()) throw std::domain_error("SpanCoordinates: columns are dependent");
    rows_ = e.pivots;
    left_inverse_ = inverse(basis.select_rows(rows_));
  }

  int size() const { return basis_.cols(); }
  const Matrix& basis() const { return basis_; }

  std::optional<std::vector<Rational>> coordinates(std::span<const Rational> v) const {
    if (int(v.size()) != basis_.rows()) throw std::invalid_argument("SpanCoordinates: length mismatch");
    std::vector<Rational> vr;
    for (int r : rows_) vr.push_back(v[r]);
    std::vector<Rational> c = left_inverse_ * std::span<const Rational>(vr);
    if (basis_ * std::span<const Rational>(c) != std::vector<Rational>(v.begin(), v.end()))
      return std::nullopt;
    return c;
  }

 private:
  Matrix basis_;
  std::vector<int> rows_;
  Matrix left_inverse_;
};

/// Dense coefficient layout for (vector) polynomials of bounded degree:
/// component-major blocks, each block in graded monomial order.
class CoefficientLayout {
 public:
  CoefficientLayout(int dim, int ncomp, int degree)
      : dim_(dim), ncomp_(ncomp), degree_(degree), monos_(monomials(dim, degree)) {
    for (int i = 0; i < int(monos_.size()); ++i) index_[monos_[i]] = i;
  }

  int dim() const { return dim_; }
  int ncomp() const { return ncomp_; }
  int degree() const { return degree_; }
  int size() const { return ncomp_ * int(monos_.size()); }

  std::vector<Rational> vectorize(const VectorPolynomial& v) const {
    if (v.size() != ncomp_ || v.dim() != dim_) throw std::invalid_argument("CoefficientLayout: shape mismatch");
    std::vector<Rational> out(size());
    for (int c = 0; c < ncomp_; ++c)
      for (const auto& [e, coef] : v[c].terms()) {
        auto it = index_.find(e);
        if (it == index_.end()) throw std::out_of_range("CoefficientLayout: degree exceeds layout");
        out[c * monos_.size() + it->second] = coef;
      }
    return out;
  }
  std::vector<Rational> vectorize(const Polynomial& p) const {
    return vectorize(VectorPolynomial(std::vector<Polynomial>{p}));
  }

  VectorPolynomial devectorize(std::span<const Rational> x) const {
    VectorPolynomial v(ncomp_, dim_);
    const int m = int(monos_.size());
    for (int c = 0; c < ncomp_; ++c)
      for (int i = 0; i < m; ++i)
        if (x[c * m + i] != 0) v[c].add_term(monos_[i], x[c * m + i]);
    return v;
  }

  Matrix matrix(std::span<const VectorPolynomial> vs) const {
    std::vector<std::vector<Rational>> cols;
    for (const auto& v : vs) cols.push_back(vectorize(v));
    return Matrix::from_columns(cols, size());
  }
  Matrix matrix(std::span<const Polynomial> ps) const {
    std::vector<std::vector<Rational>> cols;
    for (const auto& p : ps) cols.push_back(vectorize(p));
    return Matrix::from_columns(cols, size());
  }

 private:
  int dim_, ncomp_, degree_;
  std::vector<Exponent> monos_;
  std::map<Exponent, int> index_;
};

inline int max_degree(std::span<const VectorPolynomial> vs) {
  int d = 0;
  for (const auto& v : vs) d = std::max(d, v.degree());
  return d;
}
inline int max_degree(std::span<const Polynomial> ps) {
  int d = 0;
  for (const auto& p : ps) d = std::max(d, p.degree());
  return d;
}

/// Layout large enough for every field in `vs`.
inline CoefficientLayout layout_for(std::span<const VectorPolynomial> vs, int min_degree = 0) {
  if (vs.empty()) throw std::invalid_argument("layout_for: empty set");
  return CoefficientLayout(vs[0].dim(), vs[0].size(), std::max(min_degree, max_degree(vs)));
}
inline CoefficientLayout layout_for(std::span<const Polynomial> ps, int min_degree = 0) {
  if (ps.empty()) throw std::invalid_argument("layout_for: empty set");
  return CoefficientLayout(ps[0].dim(), 1, std::max(min_degree, max_degree(ps)));
}

/// Rank of a family of (vector) polynomials.
template <class P>
int span_rank(std::span<const P> family) {
  if (family.empty()) return 0;
  return rank(layout_for(family).matrix(family));
}

/// Greedy independent subfamily (keeps the earliest members).
template <class P>
std::vector<P> independent_subset(std::span<const P> family) {
  if (family.empty()) return {};
  auto cols = independent_columns(layout_for(family).matrix(family));
  std::vector<P> out;
  for (int j : cols) out.push_back(family[j]);
  return out;
}

/// Linear combination sum_j c_j f_j.
template <class P>
P combine(std::span<const P> family, std::span<const Rational> c, const P& zero) {
  P r = zero;
  for (std::size_t j = 0; j < family.size(); ++j)
    if (c[j] != 0) r += family[j] * c[j];
  return r;
}

/// True when span(a) == span(b) (mutual containment by rank).
template <class P>
bool same_span(std::span<const P> a, std::span<const P> b) {
  if (a.empty() || b.empty()) return span_rank(a) == span_rank(b);
  std::vector<P> all(a.begin(), a.end());
  all.insert(all.end(), b.begin(), b.end());
  const int ra = span_rank(a), rb = span_rank(b);
  const int rab = span_rank(std::span<const P>(all));
  return ra == rb && rab == ra;
}

/// span(a) contained in span(b).
template <class P>
bool contained_in(std::span<const P> a, std::span<const P> b) {
  if (a.empty()) return true;
  std::vector<P> all(b.begin(), b.end());
  all.insert(all.end(), a.begin(), a.end());
  return span_rank(std::span<const P>(all)) == span_rank(b);
}

}  // namespace nedelec
