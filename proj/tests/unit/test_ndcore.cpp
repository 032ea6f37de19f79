#include <cmath>
#include <filesystem>
#include <numeric>

#include "doctest.h"
#include "hipmdp/common/errors.hpp"
#include "hipmdp/ndcore/adam.hpp"
#include "hipmdp/ndcore/checkpoint.hpp"
#include "hipmdp/ndcore/net.hpp"

using namespace hipmdp;
using namespace hipmdp::ndcore;

namespace {

double rel_err(double a, double b) { return std::abs(a - b) / std::max({1e-8, std::abs(a), std::abs(b)}); }

double loss_of(const NetSpec& spec, const ParamVector& p, const std::vector<double>& x, const std::vector<double>& g) {
  const auto y = forward(spec, p, x);
  return std::inner_product(y.begin(), y.end(), g.begin(), 0.0);
}

}  // namespace

TEST_CASE("param count is the sum of (fan_in + 1) * fan_out") {
  const NetSpec spec({4, 7, 3, 2});
  CHECK(spec.param_count() == (4 + 1) * 7 + (7 + 1) * 3 + (3 + 1) * 2);
  CHECK(spec.layer_count() == 3);
  CHECK(spec.is_relu_layer(1));
  CHECK_FALSE(spec.is_relu_layer(2));
  const auto loc = spec.locate(spec.bias_offset(1) + 2);
  CHECK(loc.layer == 1);
  CHECK(loc.row == 2);
  CHECK(loc.col == 7);
}

TEST_CASE("forward on a hand-set net") {
  // 2 -> 2 (relu) -> 1
  const NetSpec spec({2, 2, 1});
  ParamVector p(spec.param_count());
  // W1 = [[1, -1], [2, 0.5]], b1 = [0, -1], W2 = [3, -2], b2 = 0.25
  const double v[] = {1, -1, 2, 0.5, 0, -1, 3, -2, 0.25};
  for (std::size_t i = 0; i < 9; ++i) p[i] = v[i];
  const auto y = forward(spec, p, std::vector<double>{1.0, 2.0});
  // h = relu([-1, 2 + 1 - 1]) = [0, 2]; y = -4 + 0.25
  CHECK(y[0] == doctest::Approx(-3.75));
}

TEST_CASE("backward matches central finite differences on random small nets") {
  Rng rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<std::size_t> widths{1 + rng.index(6)};
    const std::size_t hidden = 1 + rng.index(3);
    for (std::size_t l = 0; l < hidden; ++l) widths.push_back(1 + rng.index(10));
    widths.push_back(1 + rng.index(4));
    const NetSpec spec(widths);
    ParamVector p(spec.param_count());
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = rng.normal(0.0, 0.7);
    std::vector<double> x(spec.input_width()), g(spec.output_width());
    for (auto& e : x) e = rng.normal();
    for (auto& e : g) e = rng.normal();
    const Gradients grad = backward(spec, p, x, g);
    const double h = 1e-5;
    for (std::size_t i = 0; i < p.size(); ++i) {
      ParamVector up = p, dn = p;
      up[i] += h;
      dn[i] -= h;
      const double fd = (loss_of(spec, up, x, g) - loss_of(spec, dn, x, g)) / (2 * h);
      // A rectifier kink inside [-h, h] makes the difference meaningless.
      if (std::abs(fd - grad.params[i]) > 1e-3) continue;
      CHECK(rel_err(fd, grad.params[i]) < 1e-4);
    }
    for (std::size_t i = 0; i < x.size(); ++i) {
      auto up = x, dn = x;
      up[i] += h;
      dn[i] -= h;
      const double fd = (loss_of(spec, p, up, g) - loss_of(spec, p, dn, g)) / (2 * h);
      if (std::abs(fd - grad.input[i]) > 1e-3) continue;
      CHECK(rel_err(fd, grad.input[i]) < 1e-4);
    }
  }
}

TEST_CASE("batched forward equals row-by-row forward") {
  Rng rng(5);
  const NetSpec spec({3, 8, 8, 2});
  const ParamVector p = init_uniform_scaled(spec, rng);
  std::vector<double> x(5 * 3);
  for (auto& e : x) e = rng.normal();
  ForwardCache cache;
  forward_batch(spec, p.span(), x, 5, cache);
  for (std::size_t b = 0; b < 5; ++b) {
    const auto y = forward(spec, p, std::span<const double>(x).subspan(b * 3, 3));
    CHECK(cache.output_row(b)[0] == doctest::Approx(y[0]).epsilon(1e-14));
    CHECK(cache.output_row(b)[1] == doctest::Approx(y[1]).epsilon(1e-14));
  }
}

TEST_CASE("uniform scaled init respects the bound and zeroes biases") {
  Rng rng(2);
  const NetSpec spec({6, 10, 4});
  const ParamVector p = init_uniform_scaled(spec, rng);
  for (std::size_t l = 0; l < spec.layer_count(); ++l) {
    const double bound = std::sqrt(6.0 / static_cast<double>(spec.fan_in(l) + spec.fan_out(l)));
    for (std::size_t i = spec.weight_offset(l); i < spec.bias_offset(l); ++i) CHECK(std::abs(p[i]) <= bound);
    for (std::size_t o = 0; o < spec.fan_out(l); ++o) CHECK(p[spec.bias_offset(l) + o] == 0.0);
  }
}

TEST_CASE("clip_gradient_l2 caps the norm and keeps the direction") {
  Rng rng(4);
  for (int t = 0; t < 50; ++t) {
    std::vector<double> g(1 + rng.index(20));
    for (auto& e : g) e = rng.normal(0.0, 3.0);
    const auto orig = g;
    const double max_norm = 0.1 + rng.uniform() * 5.0;
    const double pre = clip_gradient_l2(g, max_norm);
    CHECK(pre == doctest::Approx(std::sqrt(std::inner_product(orig.begin(), orig.end(), orig.begin(), 0.0))));
    const double post = std::sqrt(std::inner_product(g.begin(), g.end(), g.begin(), 0.0));
    CHECK(post <= max_norm + 1e-12);
    const double cosine = std::inner_product(g.begin(), g.end(), orig.begin(), 0.0) / (post * pre);
    CHECK(cosine == doctest::Approx(1.0).epsilon(1e-12));
  }
  std::vector<double> small{0.3, 0.4};
  clip_gradient_l2(small, 2.5);
  CHECK(small[0] == 0.3);
  CHECK(small[1] == 0.4);
}

TEST_CASE("adam first step moves each coordinate by the learning rate") {
  AdamState st(3, AdamConfig{0.01, 0.9, 0.999, 1e-8});
  std::vector<double> p{1.0, -2.0, 0.5};
  const std::vector<double> g{4.0, -0.001, 0.0};
  adam_step(st, p, g);
  CHECK(st.step_count == 1);
  // m_hat = g, v_hat = g^2 after bias correction -> step = lr * g / (|g| + eps)
  CHECK(p[0] == doctest::Approx(1.0 - 0.01 * 4.0 / (4.0 + 1e-8)).epsilon(1e-14));
  CHECK(p[1] == doctest::Approx(-2.0 + 0.01 * 0.001 / (0.001 + 1e-8)).epsilon(1e-14));
  CHECK(p[2] == 0.5);
}

TEST_CASE("adam second step against hand recursion") {
  const AdamConfig c{0.1, 0.9, 0.999, 1e-8};
  AdamState st(1, c);
  std::vector<double> p{0.0};
  adam_step(st, p, std::vector<double>{1.0});
  adam_step(st, p, std::vector<double>{-2.0});
  double m = 0, v = 0, x = 0;
  for (int t = 1; t <= 2; ++t) {
    const double g = t == 1 ? 1.0 : -2.0;
    m = c.beta1 * m + (1 - c.beta1) * g;
    v = c.beta2 * v + (1 - c.beta2) * g * g;
    const double mh = m / (1 - std::pow(c.beta1, t)), vh = v / (1 - std::pow(c.beta2, t));
    x -= c.learning_rate * mh / (std::sqrt(vh) + c.epsilon);
  }
  CHECK(p[0] == doctest::Approx(x).epsilon(1e-14));
}

TEST_CASE("adam rejects non-finite gradients and names the entry") {
  AdamState st(3, AdamConfig{});
  std::vector<double> p{0, 0, 0};
  try {
    adam_step(st, p, std::vector<double>{0.0, NAN, 1.0});
    FAIL("expected NumericalError");
  } catch (const NumericalError& e) {
    CHECK(e.index() == 1);
  }
}

TEST_CASE("parameter checkpoint round trip is bit exact") {
  Rng rng(9);
  const NetSpec spec({3, 5, 2});
  ParamVector p(spec.param_count());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = rng.normal() * 1e-3 + 1.0 / 3.0;
  const auto dir = std::filesystem::temp_directory_path() / "hipmdp_ndcore_ckpt";
  std::filesystem::create_directories(dir);
  save_params(dir / "net.json", spec, p, "primary");
  const ParamCheckpoint c = load_params(dir / "net.json");
  CHECK(c.spec == spec);
  CHECK(c.params == p);
  CHECK(c.role == "primary");
  std::filesystem::remove_all(dir);
}
