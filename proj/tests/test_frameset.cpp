#include "gabor/frameset.hpp"

#include <gtest/gtest.h>

#include <set>
#include <sstream>

using gabor::CertificateSource;
using gabor::GridSpec;
using gabor::Rational;
using gabor::TestOptions;
using gabor::VerdictKind;

TEST(Grid, ContainsOriginAndIsDeterministic) {
  auto b2 = gabor::bspline(2);
  auto lat = gabor::LatticeParams::make(Rational(1, 3), Rational(5, 2));
  GridSpec grid{8, 8};
  auto xs = gabor::grid_x_points(b2, lat, grid);
  EXPECT_EQ(xs.front(), 0.0);
  EXPECT_LT(xs.back(), 2.0);
  EXPECT_TRUE(std::is_sorted(xs.begin(), xs.end()));
  EXPECT_EQ(xs, gabor::grid_x_points(b2, lat, grid));
  auto xis = gabor::grid_xi_points(grid);
  EXPECT_EQ(xis.front(), 0.0);
  EXPECT_EQ(xis.size(), 8u);
  grid.reduced_domain = true;
  auto rx = gabor::grid_x_points(b2, lat, grid);
  EXPECT_LT(rx.back(), 1.0 / 3.0);
  GridSpec bad{0, 4};
  EXPECT_THROW(gabor::grid_x_points(b2, lat, bad), std::invalid_argument);
}

TEST(Grid, DiscontinuousWindowGetsJumpOffsets) {
  auto chi = gabor::characteristic(Rational(0), Rational(1));
  auto lat = gabor::LatticeParams::make(Rational(1, 2), Rational(3, 2));
  GridSpec grid{4, 4};
  auto xs = gabor::grid_x_points(chi, lat, grid);
  std::set<double> s(xs.begin(), xs.end());
  // (0 - 2/3) mod 1/2 = 1/3 arises from k = 1.
  EXPECT_TRUE(s.count(Rational(1, 3).to_double()));
}

TEST(TestLattice, PropTwoExample) {
  auto v = gabor::test_lattice(gabor::bspline(2), Rational(1, 3), Rational(5, 2));
  EXPECT_EQ(v.kind, VerdictKind::CertifiedNotFrame);
  EXPECT_EQ(v.source, CertificateSource::Prop2);
  ASSERT_TRUE(v.prop2_params);
  EXPECT_EQ(v.prop2_params->r, 2);
  EXPECT_EQ(v.certificate_reports.size(), 3u);
  for (const auto &r : v.certificate_reports) EXPECT_TRUE(r.residuals_exactly_zero());
  EXPECT_FALSE(v.scan);
  EXPECT_TRUE(v.caveats.empty());
}

TEST(TestLattice, DensityAndDelPrete) {
  auto d = gabor::test_lattice(gabor::gaussian(1.0), Rational(3, 2), Rational(1));
  EXPECT_EQ(d.source, CertificateSource::Density);
  EXPECT_TRUE(d.certified());
  auto v = gabor::test_lattice(gabor::bspline(2), Rational(1, 3), Rational(2));
  EXPECT_EQ(v.source, CertificateSource::DelPrete);
  ASSERT_TRUE(v.delprete_check);
  EXPECT_LT(v.delprete_check->margin, 1e-8);
  EXPECT_THROW(gabor::test_lattice(gabor::bspline(2), Rational(0), Rational(1)), std::domain_error);
}

TEST(TestLattice, GaussianPositiveControl) {
  auto v = gabor::test_lattice(gabor::gaussian(1.0), Rational(1), Rational(1, 2));
  EXPECT_EQ(v.kind, VerdictKind::LikelyFrame);
  ASSERT_TRUE(v.scan);
  EXPECT_GT(v.scan->margin, 0.01);
  EXPECT_EQ(v.scan->points, 64u * 64u + 0u);
}

TEST(TestLattice, SplineRegressionValue) {
  // Regression value from the numeric scan, not a mathematical claim.
  auto v = gabor::test_lattice(gabor::bspline(2), Rational(1, 2), Rational(1));
  EXPECT_EQ(v.kind, VerdictKind::LikelyFrame);
}

TEST(TestLattice, DiscontinuousCaveat) {
  auto v = gabor::test_lattice(gabor::characteristic(Rational(0), Rational(1)), Rational(1, 2), Rational(1), GridSpec{16, 16});
  EXPECT_FALSE(v.caveats.empty());
}

TEST(TestLattice, ForcedScanAgreesWithCertificates) {
  TestOptions opt;
  opt.force_scan = true;
  for (auto [a, b] : {std::pair{Rational(1, 3), Rational(5, 2)}, {Rational(1, 5), Rational(7, 2)}, {Rational(1, 3), Rational(2)}}) {
    auto v = gabor::test_lattice(gabor::bspline(2), a, b, {}, opt);
    EXPECT_TRUE(v.certified());
    ASSERT_TRUE(v.scan);
    EXPECT_LT(v.scan->margin, 1e-8);
  }
}

TEST(TestLatticeProperty, RefinementOnlyLowersMargin) {
  const std::vector<std::pair<Rational, Rational>> lats = {
      {Rational(1, 2), Rational(1)}, {Rational(1, 3), Rational(13, 5)}, {Rational(2, 3), Rational(1)}, {Rational(1, 4), Rational(3, 2)}};
  for (const auto &g : {gabor::bspline(2), gabor::bspline(3), gabor::gaussian(1.0)})
    for (const auto &[a, b] : lats) {
      auto coarse = gabor::test_lattice(g, a, b, GridSpec{16, 16});
      auto fine = gabor::test_lattice(g, a, b, GridSpec{32, 32});
      if (coarse.certified()) {
        EXPECT_EQ(fine.kind, coarse.kind);
        continue;
      }
      ASSERT_TRUE(coarse.scan && fine.scan);
      EXPECT_LE(fine.scan->margin, coarse.scan->margin);
      if (coarse.not_frame()) {
        EXPECT_TRUE(fine.not_frame());
      }
    }
}

TEST(ScanMargin, ThreadCountIrrelevant) {
  auto b3 = gabor::bspline(3);
  auto lat = gabor::LatticeParams::make(Rational(1, 3), Rational(13, 5));
  GridSpec grid{24, 24};
  auto one = gabor::scan_margin(b3, lat, grid, 1);
  for (unsigned t : {2U, 3U, 8U}) {
    auto many = gabor::scan_margin(b3, lat, grid, t);
    EXPECT_EQ(many.margin, one.margin);
    EXPECT_EQ(many.x, one.x);
    EXPECT_EQ(many.xi, one.xi);
    EXPECT_EQ(many.points, one.points);
  }
}

TEST(CertificatePoints, DeterministicInRange) {
  auto a = gabor::certificate_sample_points(3, 20, 7);
  EXPECT_EQ(a, gabor::certificate_sample_points(3, 20, 7));
  for (const auto &x : a) {
    EXPECT_GE(x, Rational(0));
    EXPECT_LT(x, Rational(1, 3));
  }
}

TEST(RationalsInRange, Farey) {
  auto r = gabor::rationals_in_range({Rational(0), Rational(1)}, 3);
  std::vector<Rational> want = {Rational(0), Rational(1, 3), Rational(1, 2), Rational(2, 3), Rational(1)};
  EXPECT_EQ(r, want);
  EXPECT_THROW(gabor::rationals_in_range({Rational(1), Rational(0)}, 3), std::invalid_argument);
  EXPECT_THROW(gabor::rationals_in_range({Rational(0), Rational(1)}, 0), std::invalid_argument);
}

TEST(ScanPlane, StripContainsCertifiedPoints) {
  GridSpec grid{8, 8};
  auto res = gabor::scan_plane(gabor::bspline(2), {Rational(1, 3), Rational(1, 3)}, {Rational(21, 10), Rational(29, 10)}, 5, grid);
  std::vector<Rational> prop2;
  for (const auto &v : res.verdicts)
    if (v.source == CertificateSource::Prop2) prop2.push_back(v.beta);
  std::vector<Rational> want = {Rational(5, 2), Rational(8, 3), Rational(11, 4), Rational(14, 5)};
  EXPECT_EQ(prop2, want);
  for (const auto &v : res.verdicts) EXPECT_FALSE(v.source == CertificateSource::None && v.certified());
}

TEST(ScanPlane, OutputsStableAcrossThreads) {
  GridSpec grid{8, 8};
  TestOptions one, four;
  four.threads = 4;
  auto a = gabor::scan_plane(gabor::bspline(2), {Rational(1, 4), Rational(1)}, {Rational(1), Rational(3)}, 3, grid, one);
  auto b = gabor::scan_plane(gabor::bspline(2), {Rational(1, 4), Rational(1)}, {Rational(1), Rational(3)}, 3, grid, four);
  std::ostringstream ca, cb, pa, pb;
  gabor::write_scan_csv(a, ca);
  gabor::write_scan_csv(b, cb);
  gabor::write_heatmap(a, pa);
  gabor::write_heatmap(b, pb);
  EXPECT_EQ(ca.str(), cb.str());
  EXPECT_EQ(pa.str(), pb.str());
  for (const auto &v : a.verdicts)
    if (v.alpha * v.beta > Rational(1)) {
      EXPECT_EQ(v.source, CertificateSource::Density);
    }
}

TEST(Heatmap, LayoutAndColors) {
  GridSpec grid{4, 4};
  auto single = gabor::scan_plane(gabor::bspline(2), {Rational(1, 3), Rational(1, 3)}, {Rational(5, 2), Rational(5, 2)}, 3, grid);
  std::ostringstream os;
  gabor::write_heatmap(single, os);
  std::string s = os.str();
  EXPECT_EQ(s.substr(0, 11), "P6\n1 1\n255\n");
  EXPECT_EQ(s.size(), 14u);
  EXPECT_EQ(static_cast<unsigned char>(s[11]), 255);

  gabor::Verdict cert, numeric, likely, dens;
  cert.kind = VerdictKind::CertifiedNotFrame;
  cert.source = CertificateSource::Prop2;
  dens = cert;
  dens.source = CertificateSource::Density;
  numeric.kind = VerdictKind::NumericNotFrame;
  likely.kind = VerdictKind::LikelyFrame;
  likely.scan = gabor::GridWitness{};
  likely.scan->margin = 0.5;
  std::set<std::tuple<int, int, int>> colors;
  for (const auto *v : {&cert, &numeric, &likely, &dens}) {
    auto c = gabor::verdict_color(*v);
    colors.insert({c.r, c.g, c.b});
  }
  EXPECT_EQ(colors.size(), 4u);

  // 2 x 3 image: top row is the largest beta.
  auto res = gabor::scan_plane(gabor::bspline(2), {Rational(1, 2), Rational(1)}, {Rational(1), Rational(2)}, 2, grid);
  ASSERT_EQ(res.alphas.size(), 2u);
  ASSERT_EQ(res.betas.size(), 3u);
  std::ostringstream o2;
  gabor::write_heatmap(res, o2);
  std::string img = o2.str();
  std::string header = "P6\n2 3\n255\n";
  ASSERT_EQ(img.substr(0, header.size()), header);
  auto pixel = [&](std::size_t row, std::size_t col) {
    std::size_t at = header.size() + 3 * (row * 2 + col);
    return gabor::Rgb{static_cast<unsigned char>(img[at]), static_cast<unsigned char>(img[at + 1]),
                      static_cast<unsigned char>(img[at + 2])};
  };
  // (alpha, beta) = (1, 2) is above critical density: top-right pixel.
  EXPECT_EQ(pixel(0, 1), (gabor::Rgb{96, 0, 0}));
  EXPECT_EQ(pixel(0, 1), gabor::verdict_color(res.verdicts[1 * 3 + 2]));
  EXPECT_EQ(pixel(2, 0), gabor::verdict_color(res.verdicts[0]));
  EXPECT_THROW(gabor::write_heatmap(gabor::ScanResult{}, o2), std::invalid_argument);
  EXPECT_THROW(gabor::render_heatmap(res, "/nonexistent-dir/x.ppm"), std::runtime_error);
}

TEST(Csv, Format) {
  GridSpec grid{4, 4};
  auto res = gabor::scan_plane(gabor::bspline(2), {Rational(1, 2), Rational(1, 2)}, {Rational(1), Rational(5, 2)}, 2, grid);
  std::ostringstream os;
  gabor::write_scan_csv(res, os);
  std::istringstream in(os.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "alpha,beta,p,q,verdict,source,margin,witness_x,witness_xi");
  std::getline(in, line);
  EXPECT_EQ(line.substr(0, 11), "1/2,1,1,2,L");
  std::vector<std::string> rows;
  while (std::getline(in, line)) rows.push_back(line);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0].rfind("1/2,3/2,3,4,", 0), 0u);
  EXPECT_EQ(rows[2], "1/2,5/2,5,4,CertifiedNotFrame,density,,,");
}

TEST(Json, VerdictSchema) {
  auto v = gabor::test_lattice(gabor::bspline(2), Rational(1, 3), Rational(5, 2));
  auto j = gabor::verdict_to_json(v);
  for (const char *key : {"verdict", "source", "alpha", "beta", "p", "q", "rel_tol", "grid", "margin", "witness", "reason", "caveats"})
    EXPECT_TRUE(j.contains(key)) << key;
  EXPECT_EQ(j["verdict"], "CertifiedNotFrame");
  EXPECT_EQ(j["source"], "prop2");
  EXPECT_EQ(j["alpha"], "1/3");
  EXPECT_TRUE(j["margin"].is_null());
  EXPECT_EQ(j["prop2"]["reports"].size(), 3u);
  auto round = nlohmann::json::parse(j.dump());
  EXPECT_EQ(round, j);
}
