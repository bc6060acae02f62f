#include "cdde/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "cdde/error.hpp"

namespace cdde {

namespace {

void require_same(std::size_t a, std::size_t b, const char* what) {
    if (a != b) {
        throw Error(ErrorCode::DimensionMismatch,
                    std::string(what) + ": " + std::to_string(a) + " vs " + std::to_string(b));
    }
}

void require_finite(const std::vector<double>& values) {
    for (double v : values) {
        if (!std::isfinite(v)) throw Error(ErrorCode::NonFinite, "non-finite entry");
    }
}

}  // namespace

// ---- Vector ----

Vector::Vector(std::size_t dim, double value) : data_(dim, value) {
    if (!std::isfinite(value)) throw Error(ErrorCode::NonFinite, "non-finite fill value");
}

Vector::Vector(std::initializer_list<double> values) : data_(values) { require_finite(data_); }

Vector::Vector(std::vector<double> values) : data_(std::move(values)) { require_finite(data_); }

bool Vector::all_finite() const noexcept {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

Vector& Vector::operator+=(const Vector& rhs) {
    require_same(size(), rhs.size(), "vector add");
    for (std::size_t i = 0; i < size(); ++i) data_[i] += rhs.data_[i];
    return *this;
}

Vector& Vector::operator-=(const Vector& rhs) {
    require_same(size(), rhs.size(), "vector subtract");
    for (std::size_t i = 0; i < size(); ++i) data_[i] -= rhs.data_[i];
    return *this;
}

Vector& Vector::operator*=(double s) noexcept {
    for (double& v : data_) v *= s;
    return *this;
}

Vector operator+(Vector lhs, const Vector& rhs) { return lhs += rhs; }
Vector operator-(Vector lhs, const Vector& rhs) { return lhs -= rhs; }
Vector operator-(Vector v) { return v *= -1.0; }
Vector operator*(double s, Vector v) { return v *= s; }

Vector cwise_min(const Vector& u, const Vector& v) {
    require_same(u.size(), v.size(), "cwise_min");
    Vector out(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) out[i] = std::min(u[i], v[i]);
    return out;
}

Vector cwise_max(const Vector& u, const Vector& v) {
    require_same(u.size(), v.size(), "cwise_max");
    Vector out(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) out[i] = std::max(u[i], v[i]);
    return out;
}

double norm_inf(const Vector& v) noexcept {
    double n = 0.0;
    for (double x : v) n = std::max(n, std::abs(x));
    return n;
}

bool cmp_leq(const Vector& u, const Vector& v, double slack) {
    require_same(u.size(), v.size(), "cmp_leq");
    if (slack < 0.0) throw Error(ErrorCode::InvalidArgument, "cmp_leq slack must be >= 0");
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (!(u[i] <= v[i] + slack)) return false;
    }
    return true;
}

bool cmp_gt(const Vector& u, const Vector& v, double slack) {
    require_same(u.size(), v.size(), "cmp_gt");
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (!(u[i] > v[i] + slack)) return false;
    }
    return true;
}

// ---- Matrix ----

Matrix::Matrix(std::size_t rows, std::size_t cols, double value)
    : rows_(rows), cols_(cols), data_(rows * cols, value) {
    if (!std::isfinite(value)) throw Error(ErrorCode::NonFinite, "non-finite fill value");
}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> row_major)
    : rows_(rows), cols_(cols), data_(std::move(row_major)) {
    require_same(data_.size(), rows * cols, "matrix storage");
    require_finite(data_);
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    cols_ = rows_ ? rows.begin()->size() : 0;
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        require_same(r.size(), cols_, "ragged matrix rows");
        data_.insert(data_.end(), r.begin(), r.end());
    }
    require_finite(data_);
}

Matrix Matrix::identity(std::size_t n) {
    Matrix I(n, n);
    for (std::size_t i = 0; i < n; ++i) I(i, i) = 1.0;
    return I;
}

Matrix Matrix::diagonal(const Vector& d) {
    Matrix M(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) M(i, i) = d[i];
    return M;
}

Matrix Matrix::block(const Matrix& tl, const Matrix& tr, const Matrix& bl, const Matrix& br) {
    require_same(tl.rows(), tr.rows(), "block top rows");
    require_same(bl.rows(), br.rows(), "block bottom rows");
    require_same(tl.cols(), bl.cols(), "block left cols");
    require_same(tr.cols(), br.cols(), "block right cols");
    const std::size_t n = tl.rows() + bl.rows();
    const std::size_t m = tl.cols() + tr.cols();
    Matrix out(n, m);
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < m; ++c) {
            const bool top = r < tl.rows();
            const bool left = c < tl.cols();
            const std::size_t rr = top ? r : r - tl.rows();
            const std::size_t cc = left ? c : c - tl.cols();
            out(r, c) = top ? (left ? tl(rr, cc) : tr(rr, cc)) : (left ? bl(rr, cc) : br(rr, cc));
        }
    }
    return out;
}

Vector Matrix::column(std::size_t c) const {
    Vector out(rows_);
    for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
    return out;
}

Matrix Matrix::transpose() const {
    Matrix T(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c) T(c, r) = (*this)(r, c);
    return T;
}

bool Matrix::all_finite() const noexcept {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

double Matrix::max_abs() const noexcept {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
}

Matrix& Matrix::operator+=(const Matrix& rhs) {
    require_same(rows_, rhs.rows_, "matrix add rows");
    require_same(cols_, rhs.cols_, "matrix add cols");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += rhs.data_[i];
    return *this;
}

Matrix& Matrix::operator-=(const Matrix& rhs) {
    require_same(rows_, rhs.rows_, "matrix subtract rows");
    require_same(cols_, rhs.cols_, "matrix subtract cols");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= rhs.data_[i];
    return *this;
}

Matrix& Matrix::operator*=(double s) noexcept {
    for (double& v : data_) v *= s;
    return *this;
}

Matrix operator+(Matrix lhs, const Matrix& rhs) { return lhs += rhs; }
Matrix operator-(Matrix lhs, const Matrix& rhs) { return lhs -= rhs; }
Matrix operator*(double s, Matrix M) { return M *= s; }

Vector operator*(const Matrix& M, const Vector& v) {
    require_same(M.cols(), v.size(), "matrix-vector product");
    Vector out(M.rows());
    gemv_accumulate(M, v.span(), out.span());
    return out;
}

Matrix operator*(const Matrix& lhs, const Matrix& rhs) {
    require_same(lhs.cols(), rhs.rows(), "matrix product");
    Matrix out(lhs.rows(), rhs.cols());
    for (std::size_t i = 0; i < lhs.rows(); ++i)
        for (std::size_t k = 0; k < lhs.cols(); ++k) {
            const double a = lhs(i, k);
            if (a == 0.0) continue;
            for (std::size_t j = 0; j < rhs.cols(); ++j) out(i, j) += a * rhs(k, j);
        }
    return out;
}

void gemv_accumulate(const Matrix& M, std::span<const double> v, std::span<double> y) noexcept {
    const std::size_t cols = M.cols();
    const double* a = M.values().data();
    for (std::size_t r = 0; r < M.rows(); ++r, a += cols) {
        double acc = 0.0;
        for (std::size_t c = 0; c < cols; ++c) acc += a[c] * v[c];
        y[r] += acc;
    }
}

double norm_inf(const Matrix& M) noexcept {
    double n = 0.0;
    for (std::size_t r = 0; r < M.rows(); ++r) {
        double s = 0.0;
        for (double v : M.row(r)) s += std::abs(v);
        n = std::max(n, s);
    }
    return n;
}

// ---- LU ----

LuFactorization::LuFactorization(const Matrix& M) : n_(M.rows()), lu_(M), perm_(M.rows()) {
    if (!M.square()) {
        throw Error(ErrorCode::DimensionMismatch,
                    "LU needs a square matrix, got " + std::to_string(M.rows()) + "x" +
                        std::to_string(M.cols()));
    }
    if (!M.all_finite()) throw Error(ErrorCode::NonFinite, "LU input has non-finite entries");
    for (std::size_t i = 0; i < n_; ++i) perm_[i] = i;

    // The largest entry is the largest pivot candidate the elimination can see
    // at the outset; pivots are judged relative to it.
    const double scale = M.max_abs();
    const double threshold = kPivotTolerance * scale;
    if (n_ > 0 && scale == 0.0) throw Error(ErrorCode::SingularMatrix, "zero matrix");

    for (std::size_t k = 0; k < n_; ++k) {
        std::size_t piv = k;
        double best = std::abs(lu_(k, k));
        for (std::size_t r = k + 1; r < n_; ++r) {
            if (std::abs(lu_(r, k)) > best) {
                best = std::abs(lu_(r, k));
                piv = r;
            }
        }
        if (best <= threshold) {
            throw Error(ErrorCode::SingularMatrix,
                        "pivot " + std::to_string(best) + " below threshold at column " +
                            std::to_string(k));
        }
        if (piv != k) {
            for (std::size_t c = 0; c < n_; ++c) std::swap(lu_(k, c), lu_(piv, c));
            std::swap(perm_[k], perm_[piv]);
        }
        const double inv = 1.0 / lu_(k, k);
        for (std::size_t r = k + 1; r < n_; ++r) {
            const double f = lu_(r, k) * inv;
            lu_(r, k) = f;
            if (f == 0.0) continue;
            for (std::size_t c = k + 1; c < n_; ++c) lu_(r, c) -= f * lu_(k, c);
        }
    }
}

void LuFactorization::solve_in_place(std::span<double> rhs) const {
    std::vector<double> x(n_);
    for (std::size_t i = 0; i < n_; ++i) x[i] = rhs[perm_[i]];
    for (std::size_t i = 0; i < n_; ++i) {
        double s = x[i];
        for (std::size_t j = 0; j < i; ++j) s -= lu_(i, j) * x[j];
        x[i] = s;
    }
    for (std::size_t i = n_; i-- > 0;) {
        double s = x[i];
        for (std::size_t j = i + 1; j < n_; ++j) s -= lu_(i, j) * x[j];
        x[i] = s / lu_(i, i);
    }
    std::copy(x.begin(), x.end(), rhs.begin());
}

Vector LuFactorization::solve(const Vector& rhs) const {
    require_same(n_, rhs.size(), "solve rhs");
    Vector x = rhs;
    solve_in_place(x.span());
    return x;
}

Matrix LuFactorization::inverse() const {
    Matrix inv(n_, n_);
    std::vector<double> e(n_);
    for (std::size_t c = 0; c < n_; ++c) {
        std::fill(e.begin(), e.end(), 0.0);
        e[c] = 1.0;
        solve_in_place(e);
        for (std::size_t r = 0; r < n_; ++r) inv(r, c) = e[r];
    }
    return inv;
}

Vector solve(const Matrix& M, const Vector& rhs) { return LuFactorization(M).solve(rhs); }

Matrix inverse(const Matrix& M) { return LuFactorization(M).inverse(); }

}  // namespace cdde
