#include <limits>
#include <fstream>

#include "doctest.h"
#include "expint/tableau.hpp"

using namespace expint;

namespace {

Tableau make(std::initializer_list<std::initializer_list<double>> rows, std::initializer_list<double> weights) {
  const auto s = static_cast<Eigen::Index>(weights.size());
  DenseMatrix a = DenseMatrix::Zero(s, s);
  Eigen::Index i = 0;
  for (const auto& row : rows) {
    Eigen::Index j = 0;
    for (double v : row) a(i, j++) = v;
    ++i;
  }
  State b(s);
  Eigen::Index k = 0;
  for (double v : weights) b(k++) = v;
  return Tableau(a, b);
}

}  // namespace

TEST_SUITE("tableau") {
  TEST_CASE("classical coefficients satisfy all eight conditions") {
    const Tableau t = make({{0, 0, 0, 0}, {0.5, 0, 0, 0}, {0, 0.5, 0, 0}, {0, 0, 1, 0}},
                           {1.0 / 6, 2.0 / 6, 2.0 / 6, 1.0 / 6});
    const auto r = check_order4(t);
    CHECK(r.satisfied);
    for (double res : r.residuals) CHECK(std::abs(res) <= 1e-16);
  }

  TEST_CASE("three-eighths coefficients satisfy all eight conditions") {
    const Tableau t = make({{0, 0, 0, 0}, {1.0 / 3, 0, 0, 0}, {-1.0 / 3, 1, 0, 0}, {1, -1, 1, 0}},
                           {1.0 / 8, 3.0 / 8, 3.0 / 8, 1.0 / 8});
    const auto r = check_order4(t);
    CHECK(r.satisfied);
    CHECK(r.max_abs_residual() <= 1e-16);
  }

  TEST_CASE("weights (1,0,0,0) violate the second condition by -1/2") {
    const Tableau t = make({{0, 0, 0, 0}, {0.5, 0, 0, 0}, {0, 0.5, 0, 0}, {0, 0, 1, 0}}, {1, 0, 0, 0});
    CHECK(t.c(1) == 0.5);
    CHECK(t.c(3) == 1.0);
    const auto r = check_order4(t);
    CHECK_FALSE(r.satisfied);
    CHECK(r.residuals[0] == 0.0);
    CHECK(r.residuals[1] == -0.5);
    CHECK(r.residuals[2] == doctest::Approx(-1.0 / 3));
    CHECK(r.residuals[7] == doctest::Approx(-1.0 / 24));
  }

  TEST_CASE("residuals are LHS minus RHS for a perturbed tableau") {
    const Tableau t = make({{0, 0, 0, 0}, {0.5, 0, 0, 0}, {0, 0.5, 0, 0}, {0, 0, 1, 0}},
                           {1.0 / 6 + 1e-3, 2.0 / 6, 2.0 / 6, 1.0 / 6});
    const auto r = check_order4(t);
    CHECK(r.residuals[0] == doctest::Approx(1e-3).epsilon(1e-9));
    CHECK(r.residuals[1] == doctest::Approx(0.0).epsilon(1e-15));
    CHECK_FALSE(r.satisfied);
    CHECK(r.max_abs_residual() == doctest::Approx(1e-3).epsilon(1e-9));
  }

  TEST_CASE("builtin lookup") {
    const Tableau rk = builtin("classical-rk4");
    CHECK(rk.b(0) == 1.0 / 6);
    CHECK(rk.b(1) == 2.0 / 6);
    CHECK(rk.b(2) == 2.0 / 6);
    CHECK(rk.b(3) == 1.0 / 6);
    CHECK(rk.c(0) == 0.0);
    CHECK(rk.c(1) == 0.5);
    CHECK(rk.c(2) == 0.5);
    CHECK(rk.c(3) == 1.0);
    const Tableau te = builtin("three-eighths");
    CHECK(te.a(2, 0) == -1.0 / 3);
    CHECK(te.a(2, 1) == 1.0);
    CHECK(te.a(2, 2) == 0.0);
    CHECK(te.a(2, 3) == 0.0);
    CHECK(te.c(2) == doctest::Approx(2.0 / 3).epsilon(1e-16));
    CHECK(check_order4(rk).satisfied);
    CHECK(check_order4(te).satisfied);
    CHECK_THROWS_AS(builtin("dormand-prince"), LookupError);
    CHECK(to_string(parse_builtin_tableau("three-eighths")) == "three-eighths");
  }

  TEST_CASE("builtin residuals are within roundoff") {
    for (const char* name : {"classical-rk4", "three-eighths"}) {
      const auto r = check_order4(builtin(name));
      for (double res : r.residuals) CHECK(std::abs(res) <= 1e-16);
    }
  }

  TEST_CASE("summation order does not change the residuals beyond roundoff") {
    for (const char* name : {"classical-rk4", "three-eighths"}) {
      const Tableau t = builtin(name);
      const auto up = check_order4(t, true);
      const auto down = check_order4(t, false);
      for (std::size_t k = 0; k < 8; ++k) CHECK(std::abs(up.residuals[k] - down.residuals[k]) <= std::numeric_limits<double>::epsilon());
    }
  }

  TEST_CASE("extended precision builtin coefficients") {
    const auto t = builtin_tableau<long double>(BuiltinTableau::three_eighths);
    CHECK(std::abs(t.c(2) - 2.0L / 3.0L) < 1e-18L);
    CHECK(t.cast<double>().b(1) == 3.0 / 8);
  }

  TEST_CASE("construction errors") {
    CHECK_THROWS_AS(Tableau(DenseMatrix::Zero(3, 3), State::Zero(4)), DimensionError);
    CHECK_THROWS_AS(Tableau(DenseMatrix::Zero(3, 2), State::Zero(3)), DimensionError);
    CHECK_THROWS_AS(Tableau(DenseMatrix::Zero(0, 0), State::Zero(0)), DimensionError);
    DenseMatrix implicit = DenseMatrix::Zero(2, 2);
    implicit(0, 1) = 1.0;
    CHECK_THROWS_AS(Tableau(implicit, State::Ones(2)), ConfigError);
    DenseMatrix diag = DenseMatrix::Zero(2, 2);
    diag(1, 1) = 0.5;
    CHECK_THROWS_AS(Tableau(diag, State::Ones(2)), ConfigError);
    State nan_b = State::Ones(2);
    nan_b(0) = std::nan("");
    CHECK_THROWS_AS(Tableau(DenseMatrix::Zero(2, 2), nan_b), DomainError);
  }

  TEST_CASE("check_order4 needs four stages") {
    DenseMatrix a = DenseMatrix::Zero(3, 3);
    a(1, 0) = 0.5;
    a(2, 1) = 0.5;
    CHECK_THROWS_AS(check_order4(Tableau(a, State::Constant(3, 1.0 / 3))), UnsupportedError);
  }

  TEST_CASE("JSON round trip") {
    for (const char* name : {"classical-rk4", "three-eighths"}) {
      const Tableau t = builtin(name);
      const Tableau back = tableau_from_json(tableau_to_json(t));
      CHECK(back.a() == t.a());
      CHECK(back.b() == t.b());
      CHECK(back.c() == t.c());
    }
  }

  TEST_CASE("JSON without c derives it from the rows") {
    const Tableau t = tableau_from_json(R"({"s":4,"A":[[0,0,0,0],[0.5,0,0,0],[0,0.5,0,0],[0,0,1,0]],
                                           "b":[0.1666666666666667,0.3333333333333333,0.3333333333333333,0.1666666666666667]})");
    CHECK(t.c(3) == 1.0);
    CHECK(check_order4(t).satisfied);
  }

  TEST_CASE("JSON errors carry context") {
    auto message = [](const std::string& text) {
      try {
        tableau_from_json(text);
      } catch (const ConfigError& e) {
        return std::string(e.what());
      }
      return std::string();
    };
    const std::string parse = message("{\"s\":4,\n\"A\": [[0,0,0,0],\n  oops]}");
    CHECK(parse.find("line 3") != std::string::npos);
    CHECK(message(R"({"A":[],"b":[]})").find("'s'") != std::string::npos);
    CHECK(message(R"({"s":2,"A":[[0,0]],"b":[1,0]})").find("'A'") != std::string::npos);
    CHECK(message(R"({"s":2,"A":[[0,0],[1]],"b":[1,0]})").find("A[1]") != std::string::npos);
    CHECK(message(R"({"s":2,"A":[[0,0],[1,0]],"b":[1]})").find("'b'") != std::string::npos);
    CHECK(message(R"({"s":2,"A":[[0,0],[1,0]],"b":[1,"x"]})").find("b") != std::string::npos);
    CHECK(message(R"({"s":2,"A":[[0,0],[1,0]],"b":[0.5,0.5],"c":[0,0.9]})").find("c[1]") != std::string::npos);
    CHECK(message(R"({"s":1.5,"A":[[0]],"b":[1]})").find("'s'") != std::string::npos);
    CHECK(message("[1,2]").find("object") != std::string::npos);
    CHECK_THROWS_AS(load_tableau("/nonexistent/tableau.json"), ConfigError);
  }

  TEST_CASE("c given with one-ulp row-sum difference is accepted") {
    const Tableau t = tableau_from_json(
        R"({"s":4,"A":[[0,0,0,0],[0.3333333333333333,0,0,0],[-0.3333333333333333,1,0,0],[1,-1,1,0]],
            "b":[0.125,0.375,0.375,0.125],"c":[0,0.3333333333333333,0.6666666666666666,1]})");
    CHECK(check_order4(t).satisfied);
  }
}
