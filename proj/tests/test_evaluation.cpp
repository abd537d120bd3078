#include <doctest.h>

#include <algorithm>
#include <random>

#include "gridpop/evaluation.hpp"
#include "testutil.hpp"

using namespace gridpop;

TEST_CASE("r2: hand-checked half-explained case") {
  // observed {1,2,3,4}, predicted {1,2,4,3}: ss_res=2, ss_tot=5 -> 0.6
  const std::vector<double> obs{1, 2, 3, 4}, pred{1, 2, 4, 3};
  CHECK(std::abs(r2(obs, pred) - 0.6) < 1e-12);
  CHECK(std::abs(r2({1, 2, 3}, {1, 1, 3}) - 0.5) < 1e-12);
  CHECK(r2(obs, obs) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(r2({1, 2, 3}, {2, 2, 2})) < 1e-12);  // mean predictor -> 0
}

TEST_CASE("r2: constant observed vector is rejected") {
  CHECK_THROWS_AS(r2({3, 3, 3}, {1, 2, 3}), invalid_argument);
}

TEST_CASE("r2: worse than the mean goes negative") {
  CHECK(r2({0, 10}, {10, 0}) < 0.0);
}

TEST_CASE("meae: midpoint rule for the even-length median") {
  CHECK(std::abs(meae({10, 10}, {11, 13}) - 2.0) < 1e-12);      // errors {1,3} -> 2
  CHECK(std::abs(meae({5, 5, 5}, {5, 6, 15}) - 1.0) < 1e-12);   // errors {0,1,10} -> 1
  CHECK(meae({7}, {7}) == 0.0);
}

TEST_CASE("meape: percentage median skipping observed == 0") {
  // Rows: (obs=0 skipped), (100,125)->25%, (10,12.5)->25%, (4,3)->25%
  const MeapeResult r = meape({0, 100, 10, 4}, {3, 125, 12.5, 3});
  CHECK(std::abs(r.percent - 25.0) < 1e-12);
  CHECK(r.skipped == 1);
}

TEST_CASE("meape: all-zero observed is rejected") {
  CHECK_THROWS_AS(meape({0, 0}, {1, 2}), invalid_argument);
}

TEST_CASE("ameape: shifted denominator keeps zero rows") {
  // single row obs=0 pred=5: |5-0|/(0+10) = 0.5
  CHECK(std::abs(ameape({0}, {5}) - 0.5) < 1e-12);
  // single row obs=40 pred=30: 10/50 = 0.2
  CHECK(std::abs(ameape({40}, {30}) - 0.2) < 1e-12);
}

TEST_CASE("aggpe: percent error of the totals") {
  // totals: observed 100, predicted 113 -> 13%
  CHECK(std::abs(aggpe({60, 40}, {70, 43}) - 13.0) < 1e-12);
  CHECK(aggpe({50, 50}, {40, 60}) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("metrics: permutation invariance") {
  std::mt19937 rng(4);
  std::uniform_real_distribution<> u(0.0, 100.0);
  std::vector<double> obs, pred;
  for (int i = 0; i < 31; ++i) {
    obs.push_back(std::round(u(rng)));
    pred.push_back(u(rng));
  }
  std::vector<size_t> order(obs.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<double> obs2, pred2;
  for (size_t i : order) {
    obs2.push_back(obs[i]);
    pred2.push_back(pred[i]);
  }
  CHECK(r2(obs, pred) == doctest::Approx(r2(obs2, pred2)).epsilon(1e-12));
  CHECK(meae(obs, pred) == doctest::Approx(meae(obs2, pred2)).epsilon(1e-12));
  CHECK(meape(obs, pred).percent ==
        doctest::Approx(meape(obs2, pred2).percent).epsilon(1e-12));
  CHECK(ameape(obs, pred) == doctest::Approx(ameape(obs2, pred2)).epsilon(1e-12));
  CHECK(aggpe(obs, pred) == doctest::Approx(aggpe(obs2, pred2)).epsilon(1e-12));
}

TEST_CASE("median metrics: duplicating every row leaves them unchanged") {
  const std::vector<double> obs{3, 9, 27, 5}, pred{4, 7, 30, 5};
  std::vector<double> obs2 = obs, pred2 = pred;
  obs2.insert(obs2.end(), obs.begin(), obs.end());
  pred2.insert(pred2.end(), pred.begin(), pred.end());
  CHECK(meae(obs, pred) == doctest::Approx(meae(obs2, pred2)).epsilon(1e-12));
  CHECK(meape(obs, pred).percent ==
        doctest::Approx(meape(obs2, pred2).percent).epsilon(1e-12));
  CHECK(ameape(obs, pred) == doctest::Approx(ameape(obs2, pred2)).epsilon(1e-12));
}

namespace {

std::vector<PooledRow> small_pool() {
  // Two ROIs, two folds, four tiles each with distinct observed counts.
  std::vector<PooledRow> rows;
  const int obs[8] = {10, 20, 30, 40, 5, 15, 25, 35};
  for (int i = 0; i < 8; ++i) {
    PooledRow r;
    r.tile = {i < 4 ? "A" : "B", i};
    r.fold = i % 4;
    r.observed = obs[i];
    r.predicted = obs[i] + (i % 2 ? 2.0 : -1.0);
    rows.push_back(r);
  }
  return rows;
}

}  // namespace

TEST_CASE("pooled_report: perfect predictions and null baseline") {
  std::vector<PooledRow> rows = small_pool();
  for (auto& r : rows) r.predicted = r.observed;
  const MetricsReport rep = pooled_report(rows);
  CHECK(rep.rows_used == 8);
  CHECK(rep.model.r2 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rep.model.meae == 0.0);
  CHECK(rep.model.meape_pct == 0.0);
  CHECK(rep.model.aggpe_pct.at("overall") == 0.0);
  CHECK(rep.model.aggpe_pct.count("A") == 1);
  CHECK(rep.model.aggpe_pct.count("B") == 1);
  // The out-of-fold mean is a worse predictor than the truth.
  CHECK(rep.null_model.r2 < rep.model.r2);
}

TEST_CASE("pooled_report: null-model row uses out-of-fold means") {
  std::vector<PooledRow> rows = small_pool();
  const MetricsReport rep = pooled_report(rows);
  // Tile 0 (fold 0, observed 10): null prediction = mean of folds 1..3
  // = (20+30+40+15+25+35)/6 = 27.5; recompute the model-free MeAE by hand.
  std::vector<double> obs, null_pred;
  for (const auto& r : rows) {
    double sum = 0.0;
    int n = 0;
    for (const auto& o : rows)
      if (o.fold != r.fold) {
        sum += o.observed;
        ++n;
      }
    obs.push_back(r.observed);
    null_pred.push_back(sum / n);
  }
  CHECK(null_pred[0] == doctest::Approx(27.5).epsilon(1e-12));
  CHECK(rep.null_model.meae == doctest::Approx(meae(obs, null_pred)).epsilon(1e-12));
  CHECK(rep.null_model.r2 == doctest::Approx(r2(obs, null_pred)).epsilon(1e-12));
}

TEST_CASE("pooled_report: duplicate tiles are rejected") {
  std::vector<PooledRow> rows = small_pool();
  rows.push_back(rows[0]);
  CHECK_THROWS_AS(pooled_report(rows), invalid_argument);
}

TEST_CASE("report_to_json: exact metric key set") {
  const MetricsReport rep = pooled_report(small_pool());
  const std::string json = report_to_json(rep);
  for (const char* key : {"\"R2\"", "\"MeAPE\"", "\"aMeAPE\"", "\"MeAE\"", "\"AggPE\"",
                          "\"model\"", "\"null_model\"", "\"rows_used\""})
    CHECK(json.find(key) != std::string::npos);
  CHECK(json.find("\"r_squared\"") == std::string::npos);
}

TEST_CASE("write_scatter_svg: produces a parseable SVG with one dot per row") {
  testutil::TempDir dir("svg");
  const auto rows = small_pool();
  write_scatter_svg(rows, dir.file("s.svg"));
  const std::string svg = testutil::read_text(dir.file("s.svg"));
  CHECK(svg.find("<svg") != std::string::npos);
  size_t circles = 0, pos = 0;
  while ((pos = svg.find("<circle", pos)) != std::string::npos) {
    ++circles;
    ++pos;
  }
  CHECK(circles == rows.size());
  CHECK(svg.find("</svg>") != std::string::npos);
}
