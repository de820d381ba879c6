#ifndef PHBURGERS_BANDED_HPP
#define PHBURGERS_BANDED_HPP

#include <cstddef>
#include <span>
#include <vector>

namespace phb {

using Vector = std::vector<double>;

/*!
 * \brief Square band matrix with kl sub- and ku super-diagonals.
 *
 * Entries outside the band read as zero; writing outside the band throws.
 * Storage is row-major over the band, so row i holds columns
 * [i - kl, i + ku].
 */
class BandMatrix
{
public:
    BandMatrix() = default;
    BandMatrix(std::size_t n, std::size_t kl, std::size_t ku);

    std::size_t size() const { return n_; }
    std::size_t lower() const { return kl_; }
    std::size_t upper() const { return ku_; }

    bool in_band(std::size_t i, std::size_t j) const
    { return j + kl_ >= i && j <= i + ku_; }

    double operator()(std::size_t i, std::size_t j) const;
    double& at(std::size_t i, std::size_t j);
    void add(std::size_t i, std::size_t j, double value) { at(i, j) += value; }

    Vector multiply(std::span<const double> x) const;
    Vector multiply_transposed(std::span<const double> x) const;

    BandMatrix transposed() const;

    //! Largest absolute entry.
    double max_abs() const;
    //! Largest row sum of absolute values (infinity norm).
    double max_row_norm() const;

    BandMatrix& operator+=(const BandMatrix& other);
    BandMatrix& operator*=(double s);

private:
    std::size_t n_ = 0;
    std::size_t kl_ = 0;
    std::size_t ku_ = 0;
    std::vector<double> data_;
};

BandMatrix operator+(BandMatrix a, const BandMatrix& b);
BandMatrix operator-(BandMatrix a, const BandMatrix& b);
BandMatrix operator*(double s, BandMatrix a);

//! Cholesky factorization of a symmetric positive-definite band matrix.
//! Only the lower band of the input is read.
class BandCholesky
{
public:
    BandCholesky() = default;
    //! Throws std::runtime_error if the matrix is not positive definite.
    explicit BandCholesky(const BandMatrix& a);

    Vector solve(std::span<const double> b) const;
    void solve_in_place(std::span<double> b) const;

private:
    std::size_t n_ = 0;
    std::size_t k_ = 0;
    std::vector<double> l_; // row i, columns [i - k, i]
};

//! True when the (symmetric) band matrix admits a Cholesky factorization.
bool positive_definite(const BandMatrix& a);

/*!
 * \brief LU factorization with partial pivoting of a general band matrix.
 *
 * Pivoting widens the upper band to kl + ku. The factorization records the
 * smallest pivot relative to the infinity norm of the input so callers can
 * treat a numerically singular matrix as a failure.
 */
class BandLU
{
public:
    explicit BandLU(const BandMatrix& a);

    Vector solve(std::span<const double> b) const;
    void solve_in_place(std::span<double> b) const;

    //! min |pivot| / max row norm of the factored matrix.
    double pivot_ratio() const { return pivot_ratio_; }
    bool singular(double threshold) const { return !(pivot_ratio_ >= threshold); }

private:
    std::size_t n_;
    std::size_t kl_;
    std::size_t width_; // kl + ku + 1 stored columns of U per row
    std::vector<double> u_;
    std::vector<double> l_;
    std::vector<std::size_t> pivots_;
    double pivot_ratio_ = 0.0;
};

} // namespace phb

#endif
