#include "pactest/io.hpp"
#include "pactest/studies.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace pactest;

namespace {

Dataset sample_data(std::size_t n, const NoiseSpec& noise = {}) {
    Dataset d = generate_dataset(study_subject(Study::weak_separability, 1e-3), n, PriceLaw{PriceBox{}, 12}, 1e6, noise);
    d.label = "ws-study";
    return d;
}

std::vector<std::size_t> bad_rows(const std::string& csv) {
    std::istringstream is(csv);
    try {
        read_dataset_csv(is);
    } catch (const CsvError& e) {
        return e.rows();
    }
    return {};
}

}  // namespace

TEST_CASE("dataset CSV round trip") {
    const Dataset d = sample_data(50, NoiseSpec{NoiseFamily::truncated_gaussian, 1e-2});
    std::ostringstream os;
    write_dataset_csv(os, d, {"source=test"});
    std::istringstream is(os.str());
    std::vector<std::string> comments;
    const Dataset back = read_dataset_csv(is, &comments);
    CHECK(back.label == "ws-study");
    CHECK(std::find(comments.begin(), comments.end(), "source=test") != comments.end());
    REQUIRE(back.size() == d.size());
    CHECK(back.dim() == 3);
    for (std::size_t t = 0; t < d.size(); ++t) {
        const auto& a = d.observations[t];
        const auto& b = back.observations[t];
        CHECK((a.prices - b.prices).cwiseAbs().maxCoeff() <= 1e-12 * a.prices.cwiseAbs().maxCoeff());
        CHECK((a.quantities - b.quantities).cwiseAbs().maxCoeff() <= 1e-12 * a.quantities.cwiseAbs().maxCoeff());
        CHECK(std::abs(a.income - b.income) <= 1e-12 * a.income);
    }
    // write, read, write is byte-stable
    std::ostringstream again;
    write_dataset_csv(again, back, {"source=test"});
    CHECK(again.str() == os.str());
}

TEST_CASE("malformed dataset rows are all reported") {
    const std::string head = "t,p_1,p_2,x_1,x_2,income\n";
    const auto rows = bad_rows(head + "1,1,1,0.5,0.5,1\n"
                                      "2,1,-1,0.5,0.5,1\n"
                                      "3,1,1,0.5,0.5,1\n"
                                      "4,1,1,abc,0.5,1\n"
                                      "5,1,1,0.5\n"
                                      "6,1,1,0.5,0.5,0\n");
    CHECK(rows == std::vector<std::size_t>{2, 4, 5, 6});

    std::istringstream msg_src(head + "1,1,1,0.5,0.5,1\n2,1,1,x,0.5,1\n");
    try {
        read_dataset_csv(msg_src);
        FAIL("expected CsvError");
    } catch (const CsvError& e) {
        CHECK(std::string(e.what()).find("malformed dataset rows: 2") != std::string::npos);
    }

    std::istringstream no_header("1,1,1,0.5,0.5,1\n");
    CHECK_THROWS_AS(read_dataset_csv(no_header), CsvError);
    std::istringstream wrong_header("t,p1,p2,x1,x2,income\n");
    CHECK_THROWS_AS(read_dataset_csv(wrong_header), CsvError);
    std::istringstream empty(head);
    CHECK_THROWS_AS(read_dataset_csv(empty), CsvError);
}

TEST_CASE("gamma CSV round trip keeps infinity and warnings") {
    GammaTable t;
    t.rows = {{0.0, 0.0, 0}, {0.125, 1.5, 3}, {std::numeric_limits<double>::infinity(), 2.25, 9}};
    t.provenance = {"class=homothetic", "seed=4"};
    t.warnings = {"empty A at eps=0; gamma set to 0"};
    std::ostringstream os;
    write_gamma_csv(os, t);
    CHECK(os.str().find("eps,gamma,n_pairs_in_A") != std::string::npos);
    std::istringstream is(os.str());
    const GammaTable back = read_gamma_csv(is);
    REQUIRE(back.rows.size() == 3);
    CHECK(back.rows[1].eps == 0.125);
    CHECK(back.rows[1].gamma == 1.5);
    CHECK(back.rows[1].n_in_A == 3);
    CHECK(std::isinf(back.rows[2].eps));
    CHECK(back.provenance == t.provenance);
    CHECK(back.warnings == t.warnings);

    std::istringstream bad("eps,gamma\n0,0\n");
    CHECK_THROWS_AS(read_gamma_csv(bad), CsvError);
}

TEST_CASE("report CSV layout") {
    TestReport r;
    r.rows.push_back({1, 1.0, 0.05, 60, 0.5, 0.75, 0, false});
    r.rows.push_back({2, 1.0 / 3, 0.05 / 3, 737, 0.5, 0.75, 2, true});
    r.verdict = Verdict::reject;
    r.config = {"kind=homothetic", "seed=1"};
    r.notes = {"something noteworthy"};
    std::ostringstream os;
    write_report_csv(os, r);
    const std::string s = os.str();
    CHECK(s.find("# kind=homothetic\n") != std::string::npos);
    CHECK(s.find("# gamma_at_zero=") != std::string::npos);
    CHECK(s.find("# note: something noteworthy\n") != std::string::npos);
    CHECK(s.find("k,eps,delta,n,restriction_norm,T_n,skipped,decision\n") != std::string::npos);
    CHECK(s.find(",continue\n") != std::string::npos);
    CHECK(s.find(",reject\n") != std::string::npos);
    CHECK(s.find("# verdict=reject") != std::string::npos);

    const std::string table = format_report_table(r);
    CHECK(table.find("737") != std::string::npos);
    CHECK(table.find("reject") != std::string::npos);
}
