#include "oracles.hpp"

#include "phburgers/banded.hpp"

#include <doctest.h>

#include <random>
#include <stdexcept>

using phb::BandMatrix;

namespace {

BandMatrix random_band(std::size_t n, std::size_t kl, std::size_t ku, std::mt19937& rng, Eigen::MatrixXd& dense)
{
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    BandMatrix a(n, kl, ku);
    dense = Eigen::MatrixXd::Zero(static_cast<long>(n), static_cast<long>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (a.in_band(i, j))
            {
                const double x = u(rng);
                a.at(i, j) = x;
                dense(static_cast<long>(i), static_cast<long>(j)) = x;
            }
    return a;
}

} // namespace

TEST_SUITE("banded")
{
    TEST_CASE("multiply and transpose agree with dense products")
    {
        std::mt19937 rng(1);
        Eigen::MatrixXd d;
        const BandMatrix a = random_band(13, 2, 3, rng, d);
        const Eigen::VectorXd x = Eigen::VectorXd::Random(13);
        const auto y = oracle::to_eigen(a.multiply(oracle::to_std(x)));
        const auto z = oracle::to_eigen(a.multiply_transposed(oracle::to_std(x)));
        CHECK((y - d * x).norm() < 1e-13);
        CHECK((z - d.transpose() * x).norm() < 1e-13);

        const BandMatrix t = a.transposed();
        CHECK(t.lower() == 3);
        CHECK(t.upper() == 2);
        for (std::size_t i = 0; i < 13; ++i)
            for (std::size_t j = 0; j < 13; ++j)
                CHECK(t(i, j) == a(j, i));
    }

    TEST_CASE("entries outside the band read zero and reject writes")
    {
        BandMatrix a(5, 1, 1);
        CHECK(a(0, 4) == 0.0);
        CHECK_THROWS(a.at(0, 4));
        CHECK_THROWS(a.at(5, 5));
    }

    TEST_CASE("norms and arithmetic")
    {
        BandMatrix a(3, 1, 1);
        a.at(0, 0) = -4.0;
        a.at(1, 0) = 1.0;
        a.at(1, 2) = 2.5;
        CHECK(a.max_abs() == 4.0);
        CHECK(a.max_row_norm() == 4.0);
        const BandMatrix b = 2.0 * a - a;
        CHECK(b(1, 2) == 2.5);
        CHECK((a + a)(0, 0) == -8.0);
    }

    TEST_CASE("Cholesky solves SPD systems")
    {
        std::mt19937 rng(2);
        Eigen::MatrixXd d;
        BandMatrix a = random_band(20, 3, 3, rng, d);
        // Symmetrize and shift to make it diagonally dominant.
        for (std::size_t i = 0; i < 20; ++i)
            for (std::size_t j = i + 1; j < 20 && j <= i + 3; ++j)
            {
                a.at(j, i) = a(i, j);
                d(static_cast<long>(j), static_cast<long>(i)) = a(i, j);
            }
        for (std::size_t i = 0; i < 20; ++i)
        {
            a.at(i, i) += 8.0;
            d(static_cast<long>(i), static_cast<long>(i)) += 8.0;
        }
        const Eigen::VectorXd b = Eigen::VectorXd::Random(20);
        const phb::BandCholesky chol(a);
        const auto x = oracle::to_eigen(chol.solve(oracle::to_std(b)));
        CHECK((x - d.ldlt().solve(b)).norm() < 1e-12);
        CHECK(phb::positive_definite(a));
    }

    TEST_CASE("Cholesky rejects indefinite matrices")
    {
        BandMatrix a(2, 1, 1);
        a.at(0, 0) = 1.0;
        a.at(0, 1) = 2.0;
        a.at(1, 0) = 2.0;
        a.at(1, 1) = 1.0;
        CHECK_THROWS_AS(phb::BandCholesky{a}, std::runtime_error);
        CHECK_FALSE(phb::positive_definite(a));
    }

    TEST_CASE("LU with pivoting solves general band systems")
    {
        std::mt19937 rng(3);
        Eigen::MatrixXd d;
        const BandMatrix a = random_band(31, 4, 2, rng, d);
        const Eigen::VectorXd b = Eigen::VectorXd::Random(31);
        const phb::BandLU lu(a);
        const auto x = oracle::to_eigen(lu.solve(oracle::to_std(b)));
        CHECK((d * x - b).norm() < 1e-10 * b.norm() * d.norm());
        CHECK_FALSE(lu.singular(1e-14));
    }

    TEST_CASE("LU flags singular matrices")
    {
        BandMatrix a(3, 1, 1);
        a.at(0, 0) = 1.0;
        a.at(0, 1) = 2.0;
        a.at(1, 0) = 2.0;
        a.at(1, 1) = 4.0;
        a.at(2, 2) = 1.0;
        const phb::BandLU lu(a);
        CHECK(lu.singular(1e-14));
    }
}
