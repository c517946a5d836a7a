#include <doctest.h>

#include <fstream>
#include <random>

#include "test_support.hpp"

using namespace agglearn;

TEST_CASE("load_table parses a simple comma file") {
    Table t = parse_table("Branch,Amount\nA,100\nB,200", "mini.csv");
    CHECK(t.columns.size() == 2);
    CHECK(t.row_count() == 2);
    CHECK(t.headers() == std::vector<std::string>{"Branch", "Amount"});
    CHECK(is_text(t.column("Branch").cells[0]));
    CHECK(as_number(t.column("Amount").cells[0]) == 100.0);
    CHECK(as_number(t.column("Amount").cells[1]) == 200.0);
    CHECK(classify_column(t.column("Amount").cells).kind == ColumnKind::Kind::numeric);
}

TEST_CASE("ragged rows are rejected with the row index") {
    CHECK_THROWS_WITH_AS(parse_table("A,B\nA,100,EXTRA", "bad.csv"),
                         doctest::Contains("ragged row at row 1"), std::runtime_error);
    CHECK_THROWS_WITH_AS(parse_table("A,B\n1,2\n3", "bad.csv"),
                         doctest::Contains("ragged row at row 2"), std::runtime_error);
}

TEST_CASE("duplicate headers are rejected by trimmed name") {
    CHECK_THROWS_WITH_AS(parse_table("Amount, Amount \n1,2", "dup.csv"),
                         doctest::Contains("duplicate header 'Amount'"), std::runtime_error);
}

TEST_CASE("bank-loan fixture exposes the expected headers") {
    Table t = load_table(test_support::fixture("bankloan.csv"));
    CHECK(t.has_column("Branch"));
    CHECK(t.has_column("Customer ID"));
    CHECK(t.has_column("Loan Amount (x1000)"));
    CHECK(classify_column(t.column("Loan Amount (x1000)").cells).kind ==
          ColumnKind::Kind::numeric);
}

TEST_CASE("numeric cell grammar") {
    auto value = [](std::string_view s) {
        NumericParse p = parse_numeric_cell(s);
        REQUIRE(p.ok);
        return p.value;
    };
    CHECK(value("100") == 100.0);
    CHECK(value("-4.25") == -4.25);
    CHECK(value("+7") == 7.0);
    CHECK(value("1,234") == 1234.0);
    CHECK(value("12,345,678.99") == 12345678.99);
    CHECK(value(".5") == 0.5);
    CHECK(value("123.") == 123.0);

    SUBCASE("currency prefixes are stripped and flagged") {
        NumericParse p = parse_numeric_cell("$1,200");
        CHECK(p.ok);
        CHECK(p.value == 1200.0);
        CHECK(p.currency);
        p = parse_numeric_cell("\xe2\x82\xac""5.50");
        CHECK(p.ok);
        CHECK(p.value == 5.5);
        CHECK(p.currency);
        p = parse_numeric_cell("-$3");
        CHECK(p.ok);
        CHECK(p.value == -3.0);
        CHECK(p.currency);
    }

    SUBCASE("non-numbers stay text") {
        for (const char* s : {"n/a", "1,23", "1234,567", "1.2.3", "1e5", "12a", "-", "$", "--4"})
            CHECK_FALSE(parse_numeric_cell(s).ok);
    }
}

TEST_CASE("currency flag is recorded per column") {
    Table t = parse_table("Item,Price\nwidget,$4.50\ngadget,$12.00", "prices.csv");
    CHECK(t.column("Price").currency_flag);
    CHECK_FALSE(t.column("Item").currency_flag);
    CHECK(as_number(t.column("Price").cells[0]) == 4.5);
}

TEST_CASE("quoted fields keep embedded delimiters and quotes") {
    Table t = parse_table("Name,Note\n\"Smith, John\",\"said \"\"hi\"\"\"\nplain,ok", "q.csv");
    CHECK(as_text(t.column("Name").cells[0]) == "Smith, John");
    CHECK(as_text(t.column("Note").cells[0]) == "said \"hi\"");
}

TEST_CASE("classify_column kinds") {
    using Kind = ColumnKind::Kind;
    ColumnKind k = classify_column({Cell{100.0}, Cell{200.0}, Cell{300.0}});
    CHECK(k.kind == Kind::numeric);
    CHECK(k.numeric_fraction == 1.0);

    k = classify_column({Cell{std::string("NSW")}, Cell{std::string("VIC")},
                         Cell{std::string("QLD")}});
    CHECK(k.kind == Kind::textual);
    CHECK(k.numeric_fraction == 0.0);

    // counted by hand: 2 numeric of 3 non-empty
    k = classify_column({Cell{100.0}, Cell{std::string("n/a")}, Cell{300.0}});
    CHECK(k.kind == Kind::mixed);
    CHECK(k.numeric_fraction == doctest::Approx(2.0 / 3.0));

    k = classify_column({Cell{EmptyCell{}}, Cell{EmptyCell{}}});
    CHECK(k.kind == Kind::empty);

    // empty cells are excluded from the fraction
    k = classify_column({Cell{100.0}, Cell{EmptyCell{}}});
    CHECK(k.kind == Kind::numeric);
    CHECK(k.numeric_fraction == 1.0);
}

TEST_CASE("classify_column is pure") {
    std::vector<Cell> cells{Cell{1.0}, Cell{std::string("x")}, Cell{EmptyCell{}}, Cell{2.0}};
    ColumnKind a = classify_column(cells);
    ColumnKind b = classify_column(cells);
    CHECK(a.kind == b.kind);
    CHECK(a.numeric_fraction == b.numeric_fraction);
}

TEST_CASE("bind_roles enumerates context pairs") {
    Table loan = load_table(test_support::fixture("bankloan.csv"));
    RoleManifest m{loan.dataset_id, {"Loan Amount (x1000)"}, {"Branch"}};
    auto contexts = bind_roles(loan, m);
    REQUIRE(contexts.size() == 1);
    CHECK(contexts[0] == ContextPair{"Branch", "Loan Amount (x1000)"});

    Table emp = load_table(test_support::fixture("employment.csv"));
    RoleManifest m2{emp.dataset_id, {"Total Fully Employed"}, {"State", "Year"}};
    auto contexts2 = bind_roles(emp, m2);
    REQUIRE(contexts2.size() == 2);
    CHECK(contexts2[0] == ContextPair{"State", "Total Fully Employed"});
    CHECK(contexts2[1] == ContextPair{"Year", "Total Fully Employed"});
}

TEST_CASE("bind_roles rejects bad manifests") {
    Table loan = load_table(test_support::fixture("bankloan.csv"));
    RoleManifest unknown{loan.dataset_id, {"Loan Amount (x1000)"}, {"Zone"}};
    CHECK_THROWS_WITH_AS(bind_roles(loan, unknown), doctest::Contains("unknown column 'Zone'"),
                         std::runtime_error);

    RoleManifest overlap{loan.dataset_id, {"Branch"}, {"Branch"}};
    CHECK_THROWS_WITH_AS(bind_roles(loan, overlap),
                         doctest::Contains("both category and measure"), std::runtime_error);

    RoleManifest wrong_id{"other.csv", {"Loan Amount (x1000)"}, {"Branch"}};
    CHECK_THROWS_AS(bind_roles(loan, wrong_id), std::runtime_error);
}

TEST_CASE("manifest file round-trip") {
    RoleManifest m{"d.csv", {"Sales", "Units"}, {"Region"}};
    auto path = test_support::temp_dir("manifest") / "roles.json";
    save_manifest(m, path);
    RoleManifest loaded = load_manifest(path);
    CHECK(loaded.dataset_id == m.dataset_id);
    CHECK(loaded.measure_columns == m.measure_columns);
    CHECK(loaded.category_columns == m.category_columns);
}

TEST_CASE("all columns report the same length") {
    Table t = load_table(test_support::fixture("weather.csv"));
    REQUIRE(!t.columns.empty());
    for (const auto& col : t.columns) CHECK(col.cells.size() == t.row_count());
}

namespace {

Cell random_cell(std::mt19937& gen) {
    std::uniform_int_distribution<int> pick(0, 4);
    std::uniform_real_distribution<double> num(-1e6, 1e6);
    switch (pick(gen)) {
        case 0: return EmptyCell{};
        case 1: return num(gen);
        case 2: return std::round(num(gen));
        case 3: {
            static const char* words[] = {"alpha", "b,eta", "ga\"mma", "del\nta", " pad ", "n/a"};
            return std::string(words[gen() % 6]);
        }
        default: return num(gen) / 1e9;  // small magnitudes exercise 0.0001-style output
    }
}

}  // namespace

TEST_CASE("round-trip: save then reload reproduces headers and cells") {
    std::mt19937 gen(42);
    for (int iteration = 0; iteration < 25; ++iteration) {
        Table t;
        t.dataset_id = "rt.csv";
        std::size_t cols = 1 + gen() % 4;
        std::size_t rows = gen() % 30;
        for (std::size_t c = 0; c < cols; ++c) {
            Column col;
            col.name = "col" + std::to_string(c);
            for (std::size_t r = 0; r < rows; ++r) col.cells.push_back(random_cell(gen));
            t.columns.push_back(std::move(col));
        }

        Table back = parse_table(table_to_text(t), "rt.csv");
        REQUIRE(back.columns.size() == t.columns.size());
        CHECK(back.headers() == t.headers());
        for (std::size_t c = 0; c < cols; ++c) {
            REQUIRE(back.columns[c].cells.size() == t.columns[c].cells.size());
            for (std::size_t r = 0; r < rows; ++r)
                CHECK(back.columns[c].cells[r] == t.columns[c].cells[r]);
        }
    }
}

TEST_CASE("round-trip through an actual file, fixture included") {
    Table t = load_table(test_support::fixture("bankloan.csv"));
    auto path = test_support::temp_dir("roundtrip") / "bankloan-copy.csv";
    save_table(t, path);
    Table back = load_table(path);
    CHECK(back.headers() == t.headers());
    REQUIRE(back.columns.size() == t.columns.size());
    for (std::size_t c = 0; c < t.columns.size(); ++c)
        CHECK(back.columns[c].cells == t.columns[c].cells);
}

TEST_CASE("format_number avoids exponent notation") {
    CHECK(format_number(1000000.0) == "1000000");
    CHECK(format_number(0.0000001) == "0.0000001");
    CHECK(format_number(-2.5) == "-2.5");
    CHECK(format_number(0.0) == "0");
    // extreme magnitudes still reparse to the same double
    for (double v : {1.2345678901234567e+29, -9.87e-21, 1e300, 5e-324}) {
        NumericParse p = parse_numeric_cell(format_number(v));
        REQUIRE(p.ok);
        CHECK(p.value == v);
    }
}

TEST_CASE("tab delimiter support") {
    Table t = parse_table("A\tB\nx\t1\ny\t2", "tabbed.tsv", '\t');
    CHECK(t.row_count() == 2);
    CHECK(as_number(t.column("B").cells[1]) == 2.0);
    // commas are plain text in tab files unless they form valid digit groups
    Table t2 = parse_table("A\tB\n1,5\t2\n1,500\t3", "tabbed.tsv", '\t');
    CHECK(as_text(t2.column("A").cells[0]) == "1,5");
    CHECK(as_number(t2.column("A").cells[1]) == 1500.0);
}
