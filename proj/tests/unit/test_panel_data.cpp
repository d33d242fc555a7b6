#include <doctest.h>

#include "orddid/error.hpp"
#include "orddid/panel_data.hpp"
#include "test_support.hpp"

using namespace orddid;

namespace {

std::vector<Record> tiny_records() {
  // Two units per group, two periods, outcomes cover 0..2.
  return {{0, 0, 0, 0, 0}, {0, 1, 1, 0, 0}, {1, 0, 2, 0, 1}, {1, 1, 1, 0, 1},
          {2, 0, 1, 1, 2}, {2, 1, 2, 1, 2}, {3, 0, 0, 1, 3}, {3, 1, 2, 1, 3}};
}

}  // namespace

TEST_SUITE("panel_data") {
  TEST_CASE("construction validates records") {
    PanelDataset d(tiny_records(), {3, true, {}});
    CHECK(d.size() == 8);
    CHECK(d.n_units() == 4);
    CHECK(d.n_units_in_group(1) == 2);
    CHECK(d.n_units_in_group(0) == 2);
    CHECK(d.n_clusters() == 4);
    CHECK(d.periods() == std::vector<int>{0, 1});

    auto dup = tiny_records();
    dup.push_back({0, 0, 1, 0, 0});
    CHECK_THROWS_AS(PanelDataset(dup, {3, true, {}}), DataError);

    auto switching = tiny_records();
    switching[1].treated = 1;
    CHECK_THROWS_AS(PanelDataset(switching, {3, true, {}}), DataError);

    auto out_of_range = tiny_records();
    out_of_range[0].outcome = 3;
    CHECK_THROWS_AS(PanelDataset(out_of_range, {3, true, {}}), DataError);

    CHECK_THROWS_AS(PanelDataset(tiny_records(), {2, true, {}}), Error);
  }

  TEST_CASE("cell counts") {
    PanelDataset d(tiny_records(), {3, false, {}});
    const auto c = cell_counts(d, 1, 1);
    CHECK(c.counts == std::vector<long long>{0, 0, 2});
    CHECK(c.n == 2);
    CHECK(c.frequencies()[2] == 1.0);
    auto recs = tiny_records();
    recs.erase(recs.begin() + 4, recs.end());
    recs.push_back({2, 0, 1, 1, 2});
    PanelDataset no_treated_post(recs, {3, false, {}});
    CHECK_THROWS_AS(cell_counts(no_treated_post, 1, 1), EmptyCellError);
  }

  TEST_CASE("period selection relabels and rejects bad roles") {
    auto recs = tiny_records();
    for (auto& r : recs) r.period += 2004;
    PanelDataset d(recs, {3, false, {}});
    const auto s = select_periods(d, 2005, 2004);
    CHECK(s.periods() == std::vector<int>{0, 1});
    CHECK(cell_counts(s, 0, 0).counts == cell_counts(select_periods(d, 2004, 2005), 0, 1).counts);
    CHECK_THROWS_AS(select_periods(d, 2004, 2004), DomainError);
    CHECK_THROWS_AS(select_periods(d, 2004, 1999), DomainError);
  }

  TEST_CASE("CSV round trip") {
    const auto d = testing::sim(300, 5);
    const std::string path = testing::temp_path("roundtrip.csv");
    write_csv(d, path);
    CsvSchema schema;
    schema.cluster = "cluster";
    const auto back = load_csv(path, schema);
    REQUIRE(back.size() == d.size());
    CHECK(back.n_categories() == d.n_categories());
    CHECK(back.n_units() == d.n_units());
    for (int g = 0; g < 2; ++g) {
      for (int t = 0; t < 2; ++t) CHECK(cell_counts(back, g, t).counts == cell_counts(d, g, t).counts);
    }
    write_csv(back, testing::temp_path("roundtrip2.csv"));
    CHECK(testing::read_file(path) == testing::read_file(testing::temp_path("roundtrip2.csv")));
  }

  TEST_CASE("CSV parsing: codes, missing values, filters, quotes") {
    const std::string text =
        "\xEF\xBB\xBF" "id,time,y,treat,region,x\n"
        "\"a,1\",2010,5,0,north,0.5\n"
        "\"a,1\",2012,7,0,north,0.1\n"
        "b,2010,9,1,south,NA\n"
        "b,2012,5,1,south,1.5\n"
        "c,2010,NA,1,north,2\n"
        "c,2012,7,1,north,2\n"
        "d,2010,9,1,north,1\n"
        "d,2012,,1,north,1\n";
    const auto path = testing::write_file("codes.csv", text);
    CsvSchema schema;
    schema.covariates = {"x"};
    const auto d = load_csv(path, schema);
    CHECK(d.category_codes == std::vector<long long>{5, 7, 9});
    CHECK(d.drop_report.rows_read == 8);
    CHECK(d.drop_report.rows_dropped == 3);
    CHECK(d.drop_report.missing_by_column.at("y") == 2);
    CHECK(d.drop_report.missing_by_column.at("x") == 1);
    CHECK(d.size() == 5);
    CHECK(d.unit_labels.front() == "a,1");

    schema.filters = {{"region", "north"}};
    schema.covariates.clear();
    const auto north = load_csv(path, schema);
    CHECK(north.drop_report.rows_filtered == 2);
  }

  TEST_CASE("CSV errors") {
    CsvSchema schema;
    CHECK_THROWS_AS(load_csv(testing::temp_path("does_not_exist.csv"), schema), DataError);
    const auto bad_y = testing::write_file("bad_y.csv", "id,time,y,treat\n1,0,1.5,0\n1,1,2,0\n2,0,0,1\n");
    CHECK_THROWS_AS(load_csv(bad_y, schema), DataError);
    const auto bad_treat = testing::write_file("bad_treat.csv", "id,time,y,treat\n1,0,1,2\n1,1,2,2\n2,0,0,1\n");
    CHECK_THROWS_AS(load_csv(bad_treat, schema), DataError);
    const auto two = testing::write_file("two_codes.csv", "id,time,y,treat\n1,0,1,0\n1,1,2,0\n2,0,1,1\n");
    CHECK_THROWS_AS(load_csv(two, schema), DataError);
    const auto dup = testing::write_file("dup.csv", "id,time,y,treat\nu7,0,1,0\nu7,0,2,0\n2,0,0,1\n");
    try {
      load_csv(dup, schema);
      FAIL("expected DataError");
    } catch (const DataError& e) {
      CHECK(std::string(e.what()).find("u7") != std::string::npos);
    }
    schema.cluster = "school";
    const auto ok = testing::write_file("ok.csv", "id,time,y,treat\n1,0,1,0\n1,1,2,0\n2,0,0,1\n");
    CHECK_THROWS_AS(load_csv(ok, schema), DataError);
  }
}
