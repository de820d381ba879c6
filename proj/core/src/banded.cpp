#include "phburgers/banded.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace phb {

BandMatrix::BandMatrix(std::size_t n, std::size_t kl, std::size_t ku)
: n_(n)
, kl_(kl)
, ku_(ku)
, data_(n * (kl + ku + 1), 0.0)
{}

double BandMatrix::operator()(std::size_t i, std::size_t j) const
{
    if (!in_band(i, j))
        return 0.0;
    return data_[i * (kl_ + ku_ + 1) + (j + kl_ - i)];
}

double& BandMatrix::at(std::size_t i, std::size_t j)
{
    if (i >= n_ || j >= n_ || !in_band(i, j))
        throw std::out_of_range("BandMatrix: entry (" + std::to_string(i) + ", "
                                + std::to_string(j) + ") outside the band");
    return data_[i * (kl_ + ku_ + 1) + (j + kl_ - i)];
}

Vector BandMatrix::multiply(std::span<const double> x) const
{
    if (x.size() != n_)
        throw std::invalid_argument("BandMatrix::multiply: size mismatch");
    Vector y(n_, 0.0);
    for (std::size_t i = 0; i < n_; ++i)
    {
        const std::size_t j0 = i >= kl_ ? i - kl_ : 0;
        const std::size_t j1 = std::min(n_ - 1, i + ku_);
        double s = 0.0;
        for (std::size_t j = j0; j <= j1; ++j)
            s += (*this)(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

Vector BandMatrix::multiply_transposed(std::span<const double> x) const
{
    if (x.size() != n_)
        throw std::invalid_argument("BandMatrix::multiply_transposed: size mismatch");
    Vector y(n_, 0.0);
    for (std::size_t i = 0; i < n_; ++i)
    {
        const std::size_t j0 = i >= kl_ ? i - kl_ : 0;
        const std::size_t j1 = std::min(n_ - 1, i + ku_);
        for (std::size_t j = j0; j <= j1; ++j)
            y[j] += (*this)(i, j) * x[i];
    }
    return y;
}

BandMatrix BandMatrix::transposed() const
{
    BandMatrix t(n_, ku_, kl_);
    for (std::size_t i = 0; i < n_; ++i)
    {
        const std::size_t j0 = i >= kl_ ? i - kl_ : 0;
        const std::size_t j1 = std::min(n_ - 1, i + ku_);
        for (std::size_t j = j0; j <= j1; ++j)
            t.at(j, i) = (*this)(i, j);
    }
    return t;
}

double BandMatrix::max_abs() const
{
    double m = 0.0;
    for (double v : data_)
        m = std::max(m, std::abs(v));
    return m;
}

double BandMatrix::max_row_norm() const
{
    const std::size_t w = kl_ + ku_ + 1;
    double m = 0.0;
    for (std::size_t i = 0; i < n_; ++i)
    {
        double s = 0.0;
        for (std::size_t k = 0; k < w; ++k)
            s += std::abs(data_[i * w + k]);
        m = std::max(m, s);
    }
    return m;
}

BandMatrix& BandMatrix::operator+=(const BandMatrix& other)
{
    if (other.n_ != n_)
        throw std::invalid_argument("BandMatrix::operator+=: size mismatch");
    if (other.kl_ > kl_ || other.ku_ > ku_)
    {
        BandMatrix wider(n_, std::max(kl_, other.kl_), std::max(ku_, other.ku_));
        wider += *this;
        *this = std::move(wider);
    }
    for (std::size_t i = 0; i < n_; ++i)
    {
        const std::size_t j0 = i >= other.kl_ ? i - other.kl_ : 0;
        const std::size_t j1 = std::min(n_ - 1, i + other.ku_);
        for (std::size_t j = j0; j <= j1; ++j)
            at(i, j) += other(i, j);
    }
    return *this;
}

BandMatrix& BandMatrix::operator*=(double s)
{
    for (double& v : data_)
        v *= s;
    return *this;
}

BandMatrix operator+(BandMatrix a, const BandMatrix& b)
{
    a += b;
    return a;
}

BandMatrix operator-(BandMatrix a, const BandMatrix& b)
{
    a += (-1.0) * b;
    return a;
}

BandMatrix operator*(double s, BandMatrix a)
{
    a *= s;
    return a;
}

// ---------------------------------------------------------------------------

BandCholesky::BandCholesky(const BandMatrix& a)
: n_(a.size())
, k_(a.lower())
, l_(a.size() * (a.lower() + 1), 0.0)
{
    auto L = [this](std::size_t i, std::size_t j) -> double& { return l_[i * (k_ + 1) + (j + k_ - i)]; };

    for (std::size_t i = 0; i < n_; ++i)
    {
        const std::size_t j0 = i >= k_ ? i - k_ : 0;
        for (std::size_t j = j0; j <= i; ++j)
        {
            double s = a(i, j);
            const std::size_t m0 = std::max(j0, j >= k_ ? j - k_ : 0);
            for (std::size_t m = m0; m < j; ++m)
                s -= L(i, m) * L(j, m);
            if (i == j)
            {
                if (!(s > 0.0))
                    throw std::runtime_error("BandCholesky: matrix is not positive definite (row "
                                             + std::to_string(i) + ")");
                L(i, i) = std::sqrt(s);
            }
            else
            {
                L(i, j) = s / L(j, j);
            }
        }
    }
}

bool positive_definite(const BandMatrix& a)
{
    try
    {
        BandCholesky{a};
        return true;
    }
    catch (const std::runtime_error&)
    {
        return false;
    }
}

Vector BandCholesky::solve(std::span<const double> b) const
{
    Vector x(b.begin(), b.end());
    solve_in_place(x);
    return x;
}

void BandCholesky::solve_in_place(std::span<double> b) const
{
    if (b.size() != n_)
        throw std::invalid_argument("BandCholesky::solve: size mismatch");
    auto L = [this](std::size_t i, std::size_t j) { return l_[i * (k_ + 1) + (j + k_ - i)]; };

    for (std::size_t i = 0; i < n_; ++i)
    {
        double s = b[i];
        for (std::size_t j = (i >= k_ ? i - k_ : 0); j < i; ++j)
            s -= L(i, j) * b[j];
        b[i] = s / L(i, i);
    }
    for (std::size_t ii = n_; ii-- > 0;)
    {
        double s = b[ii];
        const std::size_t j1 = std::min(n_ - 1, ii + k_);
        for (std::size_t j = ii + 1; j <= j1; ++j)
            s -= L(j, ii) * b[j];
        b[ii] = s / L(ii, ii);
    }
}

// ---------------------------------------------------------------------------

BandLU::BandLU(const BandMatrix& a)
: n_(a.size())
, kl_(a.lower())
, width_(a.lower() + a.upper() + 1)
, u_(a.size() * (2 * a.lower() + a.upper() + 1), 0.0)
, l_(a.size() * a.lower(), 0.0)
, pivots_(a.size(), 0)
{
    // Working row i holds absolute columns [i - kl, i + ku + kl].
    const std::size_t w = 2 * kl_ + a.upper() + 1;
    auto A = [this, w](std::size_t i, std::size_t j) -> double& { return u_[i * w + (j + kl_ - i)]; };

    for (std::size_t i = 0; i < n_; ++i)
    {
        const std::size_t j0 = i >= kl_ ? i - kl_ : 0;
        const std::size_t j1 = std::min(n_ - 1, i + a.upper());
        for (std::size_t j = j0; j <= j1; ++j)
            A(i, j) = a(i, j);
    }

    const double scale = a.max_row_norm();
    double min_pivot = std::numeric_limits<double>::infinity();
    const std::size_t reach = kl_ + a.upper();

    for (std::size_t k = 0; k < n_; ++k)
    {
        const std::size_t i_end = std::min(n_ - 1, k + kl_);
        const std::size_t j_end = std::min(n_ - 1, k + reach);

        std::size_t p = k;
        double best = std::abs(A(k, k));
        for (std::size_t i = k + 1; i <= i_end; ++i)
        {
            if (std::abs(A(i, k)) > best)
            {
                best = std::abs(A(i, k));
                p = i;
            }
        }
        pivots_[k] = p;
        min_pivot = std::min(min_pivot, best);
        if (p != k)
            for (std::size_t j = k; j <= j_end; ++j)
                std::swap(A(k, j), A(p, j));

        const double pivot = A(k, k);
        if (pivot == 0.0)
            continue;
        for (std::size_t i = k + 1; i <= i_end; ++i)
        {
            const double m = A(i, k) / pivot;
            l_[k * kl_ + (i - k - 1)] = m;
            A(i, k) = 0.0;
            if (m == 0.0)
                continue;
            for (std::size_t j = k + 1; j <= j_end; ++j)
                A(i, j) -= m * A(k, j);
        }
    }

    if (n_ == 0)
        pivot_ratio_ = std::numeric_limits<double>::infinity();
    else
        pivot_ratio_ = scale > 0.0 ? min_pivot / scale : 0.0;
}

Vector BandLU::solve(std::span<const double> b) const
{
    Vector x(b.begin(), b.end());
    solve_in_place(x);
    return x;
}

void BandLU::solve_in_place(std::span<double> b) const
{
    if (b.size() != n_)
        throw std::invalid_argument("BandLU::solve: size mismatch");
    const std::size_t w = kl_ + width_;
    const std::size_t reach = width_ - 1;
    auto A = [this, w](std::size_t i, std::size_t j) { return u_[i * w + (j + kl_ - i)]; };

    for (std::size_t k = 0; k < n_; ++k)
    {
        const std::size_t p = pivots_[k];
        if (p != k)
            std::swap(b[k], b[p]);
        const std::size_t i_end = std::min(n_ - 1, k + kl_);
        for (std::size_t i = k + 1; i <= i_end; ++i)
            b[i] -= l_[k * kl_ + (i - k - 1)] * b[k];
    }
    for (std::size_t k = n_; k-- > 0;)
    {
        double s = b[k];
        const std::size_t j_end = std::min(n_ - 1, k + reach);
        for (std::size_t j = k + 1; j <= j_end; ++j)
            s -= A(k, j) * b[j];
        b[k] = s / A(k, k);
    }
}

} // namespace phb
