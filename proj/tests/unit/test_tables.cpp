#include <doctest.h>

#include <cmath>

#include "qrcert/tables.hpp"

using namespace qrcert;

TEST_SUITE("tables") {
  TEST_CASE("published tables are complete") {
    const auto names = table_names();
    CHECK(names.size() == 7);
    for (const auto& name : names) {
      const PublishedTable& t = published_table(name);
      CHECK(t.values.size() == t.p.size());
      for (const auto& row : t.values) CHECK(row.size() == t.columns.size());
    }
    CHECK(published_table("table2").value(0.95, "global").value() == 0.58411);
    CHECK(published_table("table7").value(0.8, "I2").value() == 0.0398);
    CHECK(published_table("table4").value(0.9, "phi").value() == 0.6948);
    CHECK_FALSE(published_table("table2").value(0.5, "global"));
    CHECK_FALSE(published_table("table2").value(0.95, "nothing"));
    CHECK_THROWS_AS(published_table("table1"), Error);
    CHECK(default_tolerance("table4") == 0.02);
    CHECK(default_tolerance("table6") == 0.01);
  }

  TEST_CASE("regenerated CHSH table") {
    const GeneratedTable t = generate_table("table2");
    CHECK(t.all_certified());
    for (const auto& row : diff_against_published(t)) {
      CHECK_MESSAGE(std::abs(row.deviation) <= 5e-3, row.column << " p=" << row.p);
      CHECK(row.status == "ok");
    }
    CHECK(t.cell(0.95, "local").value == doctest::Approx(0.47234).epsilon(1e-3));
    CHECK_THROWS_AS(t.cell(0.5, "local"), Error);

    const CsvTable csv = table_csv(t, 5);
    CHECK(csv.header == std::vector<std::string>{"p", "global", "local"});
    CHECK(csv.rows.size() == 5);
    CHECK(csv.rows[2][0] == "0.95");
  }

  TEST_CASE("regenerated modified-CHSH table") {
    TableOptions opts;
    opts.threads = 2;
    const GeneratedTable t = generate_table("table5", opts);
    for (const auto& row : diff_against_published(t)) CHECK_MESSAGE(row.status == "ok", row.column << " p=" << row.p);
    CHECK(t.cell(0.8, "modCHSH+").value == doctest::Approx(0.1342).epsilon(1e-2));
  }

  TEST_CASE("diff marks uncertified and distant cells") {
    GeneratedTable t;
    t.name = "table2";
    t.columns = {"global", "local"};
    t.p = {0.95};
    t.cells = {{TableCell{0.6, true}, TableCell{std::nan(""), false}}};
    const auto rows = diff_against_published(t);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].status == "warn");
    CHECK(rows[0].deviation == doctest::Approx(0.6 - 0.58411));
    CHECK(rows[1].status == "uncertified");
    CHECK(diff_against_published(t, 0.05)[0].status == "ok");
    const CsvTable csv = diff_csv(rows);
    CHECK(csv.rows[1][3] == "nan");
    CHECK(table_csv(t).rows[0][2] == "nan");
    CHECK_FALSE(t.all_certified());
  }
}
