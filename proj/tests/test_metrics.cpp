#include <cmath>

#include "doctest.h"
#include "gclab/augment.hpp"
#include "gclab/metrics.hpp"
#include "gclab/probe.hpp"
#include "oracles.hpp"

using namespace gclab;

namespace {

std::vector<int> labels_round_robin(std::size_t n, int k) {
  std::vector<int> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = static_cast<int>(i % static_cast<std::size_t>(k));
  return y;
}

Matrix onehot_rows(const std::vector<int>& y, std::size_t d) {
  Matrix h(y.size(), d);
  for (std::size_t i = 0; i < y.size(); ++i) h(i, static_cast<std::size_t>(y[i])) = 1.0;
  return h;
}

// Center of class y: stack h1 and h2 rows of the class, average them, and mix
// with the h0 class mean at weights 1/3 and 2/3.
Matrix brute_centers(const Matrix& h0, const Matrix& h1, const Matrix& h2, const std::vector<int>& y, int k) {
  Matrix mu(static_cast<std::size_t>(k), h0.cols());
  for (int c = 0; c < k; ++c) {
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < y.size(); ++i)
      if (y[i] == c) rows.push_back(i);
    for (std::size_t j = 0; j < h0.cols(); ++j) {
      double m0 = 0.0, stacked = 0.0;
      for (auto i : rows) m0 += h0(i, j);
      for (auto i : rows) stacked += h1(i, j);
      for (auto i : rows) stacked += h2(i, j);
      mu(static_cast<std::size_t>(c), j) = m0 / rows.size() / 3.0 + 2.0 / 3.0 * stacked / (2.0 * rows.size());
    }
  }
  return mu;
}

}  // namespace

TEST_CASE("class_centers: collapse cases and brute force") {
  Rng rng(1);
  const std::vector<int> y = labels_round_robin(9, 3);
  const Matrix h = oracle::random_unit_rows(9, 4, rng);
  const ClassCenters same = class_centers(h, h, h, y, 3);
  for (int c = 0; c < 3; ++c)
    for (std::size_t j = 0; j < 4; ++j) {
      const double m = (h(c, j) + h(c + 3, j) + h(c + 6, j)) / 3.0;
      CHECK(same.mu(c, j) == doctest::Approx(m).epsilon(1e-14));
    }

  const std::vector<int> single{0, 1, 2};
  const Matrix a = oracle::random_unit_rows(3, 2, rng), b = oracle::random_unit_rows(3, 2, rng),
               c = oracle::random_unit_rows(3, 2, rng);
  const ClassCenters one = class_centers(a, b, c, single, 3);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 2; ++j) CHECK(one.mu(i, j) == doctest::Approx((a(i, j) + b(i, j) + c(i, j)) / 3.0));

  const std::vector<int> uneven{0, 0, 0, 1, 1, 2, 0, 2, 1, 0};
  const Matrix h0 = oracle::random_unit_rows(10, 3, rng), h1 = oracle::random_unit_rows(10, 3, rng),
               h2 = oracle::random_unit_rows(10, 3, rng);
  const ClassCenters cc = class_centers(h0, h1, h2, uneven, 3);
  CHECK(max_abs_diff(cc.mu, brute_centers(h0, h1, h2, uneven, 3)) <= 1e-14);
  CHECK(cc.counts == std::vector<std::size_t>{5, 3, 2});
  CHECK(cc.priors[0] == doctest::Approx(0.5));
  CHECK_THROWS(class_centers(h0, h1, h2, uneven, 4));  // class 3 empty
}

TEST_CASE("center_distances") {
  Matrix same(6, 3);
  for (std::size_t i = 0; i < 6; ++i) same(i, 1) = 1.0;
  const std::vector<int> y = labels_round_robin(6, 2);
  const CenterDistances z = center_distances(same, class_centers(same, same, same, y, 2), y);
  CHECK(z.pcd == 0.0);
  CHECK(z.ncd == 0.0);

  const Matrix oh = onehot_rows(y, 2);
  const CenterDistances t = center_distances(oh, class_centers(oh, oh, oh, y, 2), y);
  CHECK(t.pcd == 0.0);
  CHECK(t.ncd == doctest::Approx(std::sqrt(2.0)));

  Rng rng(2);
  const std::vector<int> y3 = labels_round_robin(11, 3);
  const Matrix h0 = oracle::random_unit_rows(11, 4, rng), h1 = oracle::random_unit_rows(11, 4, rng),
               h2 = oracle::random_unit_rows(11, 4, rng);
  const ClassCenters cc = class_centers(h0, h1, h2, y3, 3);
  double pcd = 0.0, ncd = 0.0;
  for (std::size_t i = 0; i < 11; ++i)
    for (int c = 0; c < 3; ++c) {
      const double dist = std::sqrt(oracle::sqdist(h0, i, cc.mu, static_cast<std::size_t>(c)));
      if (c == y3[i]) pcd += dist / 11.0;
      else ncd += dist / 22.0;
    }
  const CenterDistances r = center_distances(h0, cc, y3);
  CHECK(r.pcd == doctest::Approx(pcd).epsilon(1e-13));
  CHECK(r.ncd == doctest::Approx(ncd).epsilon(1e-13));

  const std::vector<int> k1(6, 0);
  CHECK_THROWS(center_distances(same, class_centers(same, same, same, k1, 1), k1));
}

TEST_CASE("delta_aug_hat") {
  Rng rng(3);
  const Matrix h = oracle::random_unit_rows(5, 3, rng);
  CHECK(delta_aug_hat(h, h, h) == 0.0);
  Matrix e1(4, 2), e2(4, 2);
  for (std::size_t i = 0; i < 4; ++i) e1(i, 0) = e2(i, 1) = 1.0;
  CHECK(delta_aug_hat(e1, e2, e2) == doctest::Approx(std::sqrt(2.0)));

  const Matrix h1 = oracle::random_unit_rows(5, 3, rng), h2 = oracle::random_unit_rows(5, 3, rng);
  double s = 0.0;
  for (std::size_t i = 0; i < 5; ++i) s += oracle::sqdist(h, i, h1, i) + oracle::sqdist(h, i, h2, i);
  CHECK(delta_aug_hat(h, h1, h2) == doctest::Approx(std::sqrt(s / 10.0)).epsilon(1e-14));
}

TEST_CASE("class_divergences: geometry and brute-force double loop") {
  Matrix same(6, 2);
  for (std::size_t i = 0; i < 6; ++i) same(i, 0) = 1.0;
  const std::vector<int> y = labels_round_robin(6, 2);
  const ClassDivergences z = class_divergences(same, y, 2);
  CHECK(z.delta_y_plus == 0.0);
  CHECK(z.delta_y_minus == 0.0);

  const ClassDivergences t = class_divergences(onehot_rows(y, 2), y, 2);
  CHECK(t.delta_y_plus == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(t.delta_y_minus == doctest::Approx(std::sqrt(2.0)));

  // Prior-weighted brute force over ordered pairs, including a singleton class.
  Rng rng(4);
  const std::vector<int> yy{0, 0, 1, 1, 1, 2, 0, 1, 0, 3};
  const int k = 4;
  const Matrix h = oracle::random_unit_rows(yy.size(), 3, rng);
  const double n = static_cast<double>(yy.size());
  std::vector<double> cnt(k, 0.0);
  for (int c : yy) cnt[c] += 1.0;
  double plus = 0.0, plus_w = 0.0, minus = 0.0;
  for (int a = 0; a < k; ++a) {
    double intra = 0.0;
    for (std::size_t i = 0; i < yy.size(); ++i)
      for (std::size_t j = 0; j < yy.size(); ++j)
        if (i != j && yy[i] == a && yy[j] == a) intra += oracle::sqdist(h, i, h, j);
    if (cnt[a] >= 2) {
      plus += cnt[a] / n * intra / (cnt[a] * (cnt[a] - 1));
      plus_w += cnt[a] / n;
    }
    for (int b = 0; b < k; ++b) {
      if (a == b) continue;
      double inter = 0.0;
      for (std::size_t i = 0; i < yy.size(); ++i)
        for (std::size_t j = 0; j < yy.size(); ++j)
          if (yy[i] == a && yy[j] == b) inter += oracle::sqdist(h, i, h, j);
      minus += cnt[a] / n / (k - 1) * inter / (cnt[a] * cnt[b]);
    }
  }
  const ClassDivergences r = class_divergences(h, yy, k);
  CHECK(r.delta_y_plus == doctest::Approx(std::sqrt(plus / plus_w)).epsilon(1e-12));
  CHECK(r.delta_y_minus == doctest::Approx(std::sqrt(minus)).epsilon(1e-12));
  CHECK(r.warnings.size() == 2);  // classes 2 and 3 are singletons
}

TEST_CASE("mean_ce") {
  const std::vector<int> y = labels_round_robin(14, 7);
  Rng rng(5);
  const Matrix h = oracle::random_unit_rows(14, 4, rng);
  ClassCenters flat;
  flat.mu = Matrix(7, 4, 0.25);
  CHECK(mean_ce(h, flat, y) == doctest::Approx(std::log(7.0)).epsilon(1e-14));
  CHECK(mean_ce(h, flat, y) == doctest::Approx(1.9459).epsilon(1e-4));

  ClassCenters sharp;
  sharp.mu = Matrix(2, 2);
  sharp.mu(0, 0) = 60.0;
  sharp.mu(1, 1) = 60.0;
  CHECK(mean_ce(Matrix{{1, 0}, {0, 1}}, sharp, {0, 1}) < 1e-20);

  ClassCenters cc = class_centers(h, h, h, y, 7);
  double naive = 0.0;
  for (std::size_t i = 0; i < 14; ++i) {
    double z = 0.0;
    for (int c = 0; c < 7; ++c) z += std::exp(oracle::rowdot(h, i, cc.mu, c));
    naive += -std::log(std::exp(oracle::rowdot(h, i, cc.mu, y[i])) / z);
  }
  CHECK(mean_ce(h, cc, y) == doctest::Approx(naive / 14).epsilon(1e-9));
}

TEST_CASE("bound_report: collapse case and algebra") {
  const std::size_t n = 8;
  const int k = 2;
  const std::vector<int> y = labels_round_robin(n, k);
  Matrix h(n, 3);
  for (std::size_t i = 0; i < n; ++i) h(i, 2) = 1.0;
  const std::size_t m = 2 * n - 2;
  const double nce = std::log(static_cast<double>(m + 1));
  const BoundReport r = bound_report(h, h, h, y, k, nce, m);
  CHECK(r.delta_aug == 0.0);
  CHECK(r.var_pos_given_y == 0.0);
  CHECK(r.var_orig_given_y == 0.0);
  CHECK(r.var_mu == 0.0);
  CHECK(r.lhs_mean_ce == doctest::Approx(std::log(2.0)));
  const double expect = std::log(static_cast<double>(m) / (m + 1.0));
  CHECK(r.margin == doctest::Approx(expect).epsilon(1e-13));
  CHECK(r.margin < 0.0);
  CHECK(r.margin + r.slack_term >= 0.0);
  CHECK(r.slack_term == doctest::Approx(1.0 / std::sqrt(static_cast<double>(m))));

  const BoundReport km = bound_report(h, h, h, y, k, 0.7, 2);
  CHECK(km.rhs == doctest::Approx(0.7).epsilon(1e-15));
  CHECK_THROWS(bound_report(h, h, h, y, k, 0.7, 0));
}

TEST_CASE("bound_report: variance terms against direct sums") {
  Rng rng(6);
  const std::vector<int> y{0, 1, 0, 1, 1, 0, 0};
  const Matrix h0 = oracle::random_unit_rows(7, 3, rng), h1 = oracle::random_unit_rows(7, 3, rng),
               h2 = oracle::random_unit_rows(7, 3, rng);
  const BoundReport r = bound_report(h0, h1, h2, y, 2, 2.5, 12);
  const Matrix mu = brute_centers(h0, h1, h2, y, 2);
  double vp = 0.0, vo = 0.0;
  for (std::size_t i = 0; i < 7; ++i) {
    vp += (oracle::sqdist(h1, i, mu, y[i]) + oracle::sqdist(h2, i, mu, y[i])) / 14.0;
    vo += oracle::sqdist(h0, i, mu, y[i]) / 7.0;
  }
  std::vector<double> g(3, 0.0);
  const double p0 = 4.0 / 7.0, p1 = 3.0 / 7.0;
  for (std::size_t j = 0; j < 3; ++j) g[j] = p0 * mu(0, j) + p1 * mu(1, j);
  double vmu = 0.0;
  for (std::size_t c = 0; c < 2; ++c) {
    double s = 0.0;
    for (std::size_t j = 0; j < 3; ++j) s += (mu(c, j) - g[j]) * (mu(c, j) - g[j]);
    vmu += (c == 0 ? p0 : p1) * s;
  }
  CHECK(r.var_pos_given_y == doctest::Approx(vp).epsilon(1e-13));
  CHECK(r.var_orig_given_y == doctest::Approx(vo).epsilon(1e-13));
  CHECK(r.var_mu == doctest::Approx(vmu).epsilon(1e-12));
  const double d = r.delta_aug;
  const double rhs = 2.5 - 3 * d * d - 2 * d - std::log(12.0 / 2.0) - 0.5 * vp - std::sqrt(vo) - std::exp(1.0) * vmu;
  CHECK(r.rhs == doctest::Approx(rhs).epsilon(1e-12));
  CHECK(r.margin == doctest::Approx(r.lhs_mean_ce - rhs).epsilon(1e-12));
}

TEST_CASE("alignment_identity") {
  Rng rng(7);
  const Matrix h = oracle::random_unit_rows(6, 3, rng);
  const AlignmentIdentity same = alignment_identity(h, h);
  CHECK(same.lhs == 0.0);
  CHECK(std::abs(same.rhs) <= 1e-15);
  const AlignmentIdentity anti = alignment_identity(h, h * -1.0);
  CHECK(anti.lhs == doctest::Approx(4.0));
  CHECK(anti.rhs == doctest::Approx(4.0));
  for (int t = 0; t < 20; ++t) {
    const Matrix a = oracle::random_unit_rows(30, 5, rng), b = oracle::random_unit_rows(30, 5, rng);
    const AlignmentIdentity r = alignment_identity(a, b);
    CHECK(std::abs(r.lhs - r.rhs) <= 1e-12);
  }
}

TEST_CASE("center_bound_check") {
  const CenterBoundSlack z = center_bound_check(0, 0, 0, 0, 0);
  CHECK(z.slack_pos == 0.0);
  CHECK(z.slack_neg == 0.0);
  const CenterBoundSlack t = center_bound_check(0.0, std::sqrt(2.0), 0.0, std::sqrt(2.0), 0.0);
  CHECK(t.slack_neg == 0.0);
  const CenterBoundSlack r = center_bound_check(0.3, 0.9, 0.2, 0.8, 0.3);
  CHECK(r.slack_pos == doctest::Approx(0.2));
  CHECK(r.slack_neg == doctest::Approx(0.2));
  CHECK(r.slack_pos_main == doctest::Approx(0.1));
  CHECK(r.slack_neg_main == doctest::Approx(0.1));
}

TEST_CASE("center-bound slacks hold on random clustered embeddings") {
  Rng rng(8);
  for (int t = 0; t < 30; ++t) {
    const std::size_t n = 24;
    const int k = 3;
    const std::vector<int> y = labels_round_robin(n, k);
    const Matrix base = oracle::random_unit_rows(k, 4, rng);
    auto noisy = [&](double s) {
      Matrix h(n, 4);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < 4; ++j) h(i, j) = base(y[i], j) + s * rng.gaussian();
      return row_unit_normalize(h).value;
    };
    const Matrix h0 = noisy(0.3), h1 = noisy(0.6), h2 = noisy(0.6);
    const ClassCenters cc = class_centers(h0, h1, h2, y, k);
    const CenterDistances cd = center_distances(h0, cc, y);
    const ClassDivergences dv = class_divergences(h0, y, k);
    const CenterBoundSlack s = center_bound_check(cd.pcd, cd.ncd, dv.delta_y_plus, dv.delta_y_minus, delta_aug_hat(h0, h1, h2));
    CHECK(s.slack_pos >= -1e-9);
    CHECK(s.slack_neg >= -1e-9);
    CHECK(s.slack_pos_main >= -1e-9);
    CHECK(s.slack_neg_main >= -1e-9);
  }
}

TEST_CASE("label_consistency_kl") {
  const Graph g = oracle::random_graph(20, 4, 2, 0.3, 9);
  Rng rng(10);
  const EncoderParams enc = init_encoder(4, 8, 4, 2, rng);
  const Matrix h = gcn_forward(sym_normalize(g.adjacency(), true), g.features(), enc).embeddings;
  std::vector<std::size_t> ids(20);
  for (std::size_t i = 0; i < 20; ++i) ids[i] = i;
  const ProbeModel probe = fit_probe(h, g.labels(), ids, 2, {0.1, 200, 1e-8});
  ViewPlan id{std::vector<bool>(g.edges().size(), true), std::vector<bool>(4, true), ViewSource::random};
  CHECK(label_consistency_kl(enc, probe, g, id) == 0.0);
  const ViewPlan v = random_masks(g, 0.5, 0.25, rng);
  CHECK(label_consistency_kl(enc, probe, g, v) >= 0.0);

  const Matrix p{{0.5, 0.5}, {0.9, 0.1}}, q{{0.25, 0.75}, {0.9, 0.1}};
  const double kl0 = 0.5 * std::log(0.5 / 0.25) + 0.5 * std::log(0.5 / 0.75);
  CHECK(mean_row_kl(p, q) == doctest::Approx(kl0 / 2));
}
