#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "diffgt/error.hpp"
#include "diffgt/numerics/matrix.hpp"
#include "diffgt/numerics/random.hpp"
#include "diffgt/numerics/sparse.hpp"
#include "diffgt/numerics/svd.hpp"
#include "diffgt/numerics/tape.hpp"
#include "support/oracles.hpp"

using namespace diffgt;
using diffgt::testing::check_gradients;

namespace {

Matrix random_matrix(std::size_t r, std::size_t c, std::uint64_t seed) {
  RandomSource rng(seed);
  return standard_normal(rng, r, c);
}

}  // namespace

TEST_CASE("matmul: identity, hand product, shape error") {
  const Matrix m = Matrix::from_rows({{1.5, -2}, {0.25, 4}});
  CHECK(matmul(Matrix::identity(2), m) == m);
  const Matrix p = matmul(Matrix::from_rows({{1, 2}, {3, 4}}), Matrix::from_rows({{0}, {1}}));
  CHECK(p == Matrix::from_rows({{2}, {4}}));
  CHECK_THROWS_AS(matmul(Matrix(2, 3), Matrix(2, 3)), ShapeError);
  CHECK_THROWS_AS(Matrix(2, 2, std::vector<double>(3)), ShapeError);
}

TEST_CASE("matmul is associative within 1e-9 relative") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Matrix a = random_matrix(5, 7, seed * 3);
    const Matrix b = random_matrix(7, 4, seed * 3 + 1);
    const Matrix c = random_matrix(4, 6, seed * 3 + 2);
    const Matrix left = matmul(matmul(a, b), c);
    const Matrix right = matmul(a, matmul(b, c));
    CHECK(max_abs_diff(left, right) <= 1e-9 * std::max(1.0, frobenius_norm(left)));
  }
}

TEST_CASE("transposed products agree with explicit transposes") {
  const Matrix a = random_matrix(6, 3, 1);
  const Matrix b = random_matrix(6, 4, 2);
  const Matrix c = random_matrix(5, 3, 3);
  CHECK(max_abs_diff(matmul_tn(a, b), matmul(transpose(a), b)) < 1e-12);
  CHECK(max_abs_diff(matmul_nt(a, c), matmul(a, transpose(c))) < 1e-12);
}

TEST_CASE("column statistics use the population standard deviation") {
  const ColumnStats s = column_stats(Matrix::from_rows({{1, 10}, {3, 10}}));
  CHECK(s.mean[0] == doctest::Approx(2));
  CHECK(s.stddev[0] == doctest::Approx(1));
  CHECK(s.stddev[1] == 0.0);
}

TEST_CASE("standard_normal: determinism and Monte-Carlo moments") {
  RandomSource a(42);
  RandomSource b(42);
  CHECK(standard_normal(a, 3, 4) == standard_normal(b, 3, 4));

  RandomSource rng(7);
  const Matrix draws = standard_normal(rng, 1000, 1000);
  const double mean = sum(draws) / static_cast<double>(draws.size());
  double var = 0.0;
  for (double v : draws.values()) var += (v - mean) * (v - mean);
  var /= static_cast<double>(draws.size());
  CHECK(std::abs(mean) < 0.01);
  CHECK(std::abs(var - 1.0) < 0.01);
}

TEST_CASE("RandomSource streams: derive is independent and non-advancing") {
  RandomSource r(5);
  const auto before = r.position();
  RandomSource d1 = r.derive(1);
  RandomSource d2 = r.derive(2);
  CHECK(r.position() == before);
  CHECK(d1.next_u64() != d2.next_u64());
  RandomSource u(9);
  for (int i = 0; i < 1000; ++i) {
    const double x = u.uniform();
    CHECK(x >= 0.0);
    CHECK(x < 1.0);
    CHECK(u.uniform_index(7) < 7);
  }
}

TEST_CASE("sparse CSR: duplicates sum, products match dense") {
  const SparseMatrix s = SparseMatrix::from_triplets(3, 3, {{0, 1, 1.0}, {0, 1, 2.0}, {2, 0, -1.0}, {1, 2, 0.5}});
  CHECK(s.at(0, 1) == 3.0);
  CHECK(s.nonzeros() == 3);
  const Matrix x = random_matrix(3, 2, 11);
  CHECK(max_abs_diff(s.multiply(x), matmul(s.to_dense(), x)) < 1e-15);
  CHECK(max_abs_diff(s.multiply_transposed(x), matmul(transpose(s.to_dense()), x)) < 1e-15);
  CHECK_FALSE(s.is_symmetric());
  CHECK(s.transposed().to_dense() == transpose(s.to_dense()));
}

TEST_CASE("gradient_of: analytic examples and contracts") {
  SUBCASE("sum of squares") {
    Tape tape;
    Var x = tape.parameter("x", Matrix::from_rows({{1, 2}}));
    const Gradients g = tape.gradient_of(ad::sum(ad::hadamard(x, x)));
    CHECK(g.at("x") == Matrix::from_rows({{2, 4}}));
  }
  SUBCASE("constant loss gives zero gradients") {
    Tape tape;
    tape.parameter("x", Matrix::from_rows({{1, 2}}));
    const Gradients g = tape.gradient_of(tape.constant(Matrix(1, 1, 3.0)));
    CHECK(g.at("x") == Matrix(1, 2));
  }
  SUBCASE("missing handles and non-scalar losses are errors") {
    Tape tape;
    Var x = tape.parameter("x", Matrix(1, 2, 1.0));
    CHECK_THROWS_AS(tape.param("nope"), MissingHandleError);
    const Gradients g = tape.gradient_of(ad::sum(x));
    CHECK_THROWS_AS(g.at("nope"), MissingHandleError);
    CHECK_THROWS_AS(tape.gradient_of(x), ShapeError);
    CHECK_THROWS_AS(tape.parameter("x", Matrix(1, 1)), ConfigError);
  }
}

TEST_CASE("every differentiable op matches central finite differences") {
  const ParamSet params = {{"a", random_matrix(4, 3, 1)}, {"b", random_matrix(3, 4, 2)}, {"c", random_matrix(4, 3, 3)},
                           {"r", random_matrix(1, 3, 4)}};
  auto sp = std::make_shared<const SparseMatrix>(
      SparseMatrix::from_triplets(4, 4, {{0, 1, 0.5}, {1, 0, 0.5}, {2, 3, 1.0}, {3, 2, 1.0}, {1, 3, -0.7}}));
  const std::vector<std::pair<std::string, std::function<Var(Tape&)>>> cases = {
      {"matmul", [](Tape& t) { return ad::sum(ad::matmul(t.param("a"), t.param("b"))); }},
      {"matmul_nt", [](Tape& t) { return ad::sum(ad::hadamard(ad::matmul_nt(t.param("a"), t.param("c")), ad::matmul_nt(t.param("a"), t.param("c")))); }},
      {"add/sub/scale", [](Tape& t) { return ad::sum(ad::hadamard(ad::sub(ad::add(t.param("a"), t.param("c")), ad::scale(t.param("a"), 0.3)), t.param("c"))); }},
      {"add_row", [](Tape& t) { return ad::mse(ad::add_row(t.param("a"), t.param("r")), t.param("c")); }},
      {"concat", [](Tape& t) { return ad::sum(ad::hadamard(ad::concat_cols(t.param("a"), t.param("c")), ad::concat_cols(t.param("c"), ad::scale(t.param("a"), 2.0)))); }},
      {"gather", [](Tape& t) { Var g = ad::gather_rows(t.param("a"), {2, 0, 2, 3}); return ad::sum(ad::hadamard(g, g)); }},
      {"spmm", [sp](Tape& t) { Var y = ad::spmm(sp, t.param("a")); return ad::sum(ad::hadamard(y, t.param("c"))); }},
      {"softmax", [](Tape& t) { return ad::sum(ad::hadamard(ad::softmax_rows(t.param("a")), t.param("c"))); }},
      {"row_dot/log_sigmoid", [](Tape& t) { return ad::mean(ad::log_sigmoid(ad::row_dot(t.param("a"), t.param("c")))); }},
      {"logsumexp", [](Tape& t) { return ad::sum(ad::logsumexp_rows(ad::matmul(t.param("a"), t.param("b")))); }},
      {"l2_normalize", [](Tape& t) { return ad::sum(ad::hadamard(ad::l2_normalize_rows(t.param("a")), t.param("c"))); }},
  };
  for (const auto& [name, build] : cases) {
    const auto check = check_gradients(params, build);
    INFO(name << ": " << check.worst);
    CHECK(check.max_rel_error < 1e-4);
  }
}

TEST_CASE("svd_top2: diagonal, rank-1, full-SVD reconstruction oracle, errors") {
  SUBCASE("diagonal") {
    const TopTwoSvd s = svd_top2(Matrix::from_rows({{3, 0}, {0, 1}}));
    CHECK(s.singular_values[0] == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(s.singular_values[1] == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("rank one") {
    Matrix m(6, 4);
    for (std::size_t r = 0; r < 6; ++r)
      for (std::size_t c = 0; c < 4; ++c) m(r, c) = (r + 1.0) * (c - 1.5);
    const TopTwoSvd s = svd_top2(m);
    CHECK(s.singular_values[1] <= 1e-9);
    CHECK(s.singular_values[0] > 1.0);
  }
  SUBCASE("random 50×8 against a full decomposition") {
    const Matrix m = random_matrix(50, 8, 21);
    const TopTwoSvd s = svd_top2(m);
    Eigen::MatrixXd e(50, 8);
    for (std::size_t r = 0; r < 50; ++r)
      for (std::size_t c = 0; c < 8; ++c) e(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = m(r, c);
    const Eigen::JacobiSVD<Eigen::MatrixXd> full(e);
    const auto sv = full.singularValues();
    CHECK(s.singular_values[0] == doctest::Approx(sv(0)).epsilon(1e-10));
    CHECK(s.singular_values[1] == doctest::Approx(sv(1)).epsilon(1e-10));
    double tail = 0.0;
    for (Eigen::Index i = 2; i < sv.size(); ++i) tail += sv(i) * sv(i);
    const Matrix recon = matmul_nt(s.projection, s.right_vectors);
    CHECK(frobenius_norm(m - recon) == doctest::Approx(std::sqrt(tail)).epsilon(1e-9));
    CHECK(s.projection.rows() == 50);
    CHECK(s.projection.cols() == 2);
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(svd_top2(Matrix(3, 1, 1.0)), ShapeError);
    CHECK_THROWS_AS(svd_top2(Matrix(3, 3)), DegenerateInputError);
  }
}
