#pragma once

// Small dense real linear algebra: row-major matrices, vectors, a
// partial-pivoted LU factorization and the componentwise order on vectors.

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace cdde {

class Vector {
public:
    Vector() = default;
    explicit Vector(std::size_t dim, double value = 0.0);
    Vector(std::initializer_list<double> values);
    explicit Vector(std::vector<double> values);

    static Vector zeros(std::size_t dim) { return Vector(dim, 0.0); }
    static Vector ones(std::size_t dim) { return Vector(dim, 1.0); }

    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    double& operator[](std::size_t i) { return data_[i]; }
    double operator[](std::size_t i) const { return data_[i]; }

    std::span<double> span() noexcept { return data_; }
    std::span<const double> span() const noexcept { return data_; }
    const std::vector<double>& values() const noexcept { return data_; }

    auto begin() noexcept { return data_.begin(); }
    auto end() noexcept { return data_.end(); }
    auto begin() const noexcept { return data_.begin(); }
    auto end() const noexcept { return data_.end(); }

    bool all_finite() const noexcept;

    Vector& operator+=(const Vector& rhs);
    Vector& operator-=(const Vector& rhs);
    Vector& operator*=(double s) noexcept;

    friend bool operator==(const Vector&, const Vector&) = default;

private:
    std::vector<double> data_;
};

class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double value = 0.0);
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> row_major);
    // Nested braces, one inner list per row.
    Matrix(std::initializer_list<std::initializer_list<double>> rows);

    static Matrix zeros(std::size_t rows, std::size_t cols) { return Matrix(rows, cols); }
    static Matrix identity(std::size_t n);
    static Matrix diagonal(const Vector& d);
    // [top_left top_right; bottom_left bottom_right]
    static Matrix block(const Matrix& top_left, const Matrix& top_right, const Matrix& bottom_left,
                        const Matrix& bottom_right);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool square() const noexcept { return rows_ == cols_; }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
    Vector column(std::size_t c) const;
    const std::vector<double>& values() const noexcept { return data_; }

    Matrix transpose() const;
    bool all_finite() const noexcept;
    double max_abs() const noexcept;

    Matrix& operator+=(const Matrix& rhs);
    Matrix& operator-=(const Matrix& rhs);
    Matrix& operator*=(double s) noexcept;

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

Vector operator+(Vector lhs, const Vector& rhs);
Vector operator-(Vector lhs, const Vector& rhs);
Vector operator-(Vector v);
Vector operator*(double s, Vector v);
Vector operator*(const Matrix& M, const Vector& v);
Matrix operator+(Matrix lhs, const Matrix& rhs);
Matrix operator-(Matrix lhs, const Matrix& rhs);
Matrix operator*(double s, Matrix M);
Matrix operator*(const Matrix& lhs, const Matrix& rhs);

// y += M * v without allocating; sizes are the caller's responsibility.
void gemv_accumulate(const Matrix& M, std::span<const double> v, std::span<double> y) noexcept;

Vector cwise_min(const Vector& u, const Vector& v);
Vector cwise_max(const Vector& u, const Vector& v);
double norm_inf(const Vector& v) noexcept;
double norm_inf(const Matrix& M) noexcept;  // max absolute row sum

// u_i <= v_i + slack for every i.
bool cmp_leq(const Vector& u, const Vector& v, double slack = 0.0);
// u_i > v_i + slack for every i.
bool cmp_gt(const Vector& u, const Vector& v, double slack = 0.0);

// Relative pivot threshold below which a matrix is declared singular.
inline constexpr double kPivotTolerance = 1e-12;

class LuFactorization {
public:
    explicit LuFactorization(const Matrix& M);

    std::size_t dim() const noexcept { return n_; }
    Vector solve(const Vector& rhs) const;
    void solve_in_place(std::span<double> rhs) const;
    Matrix inverse() const;

private:
    std::size_t n_;
    Matrix lu_;
    std::vector<std::size_t> perm_;
};

Vector solve(const Matrix& M, const Vector& rhs);
Matrix inverse(const Matrix& M);

}  // namespace cdde
