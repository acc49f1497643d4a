#include "pactest/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

namespace pactest {

namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    return s.substr(b, s.find_last_not_of(" \t") - b + 1);
}

bool parse_double(const std::string& field, double& out) {
    const std::string s = trim(field);
    if (s.empty()) return false;
    const char* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, out);
    return ec == std::errc() && ptr == end && std::isfinite(out);
}

void write_comments(std::ostream& os, const std::vector<std::string>& lines) {
    for (const auto& l : lines) os << "# " << l << '\n';
}

std::string comment_body(const std::string& line) {
    std::string body = line.substr(1);
    if (!body.empty() && body[0] == ' ') body.erase(0, 1);
    return body;
}

}  // namespace

void write_dataset_csv(std::ostream& os, const Dataset& data, const std::vector<std::string>& header) {
    const int K = data.dim();
    write_comments(os, header);
    if (!data.label.empty()) os << "# label=" << data.label << '\n';
    os << 't';
    for (int k = 1; k <= K; ++k) os << ",p_" << k;
    for (int k = 1; k <= K; ++k) os << ",x_" << k;
    os << ",income\n";
    for (std::size_t t = 0; t < data.size(); ++t) {
        const auto& ob = data.observations[t];
        os << (t + 1);
        for (int k = 0; k < K; ++k) os << ',' << format_double(ob.prices[k]);
        for (int k = 0; k < K; ++k) os << ',' << format_double(ob.quantities[k]);
        os << ',' << format_double(ob.income) << '\n';
    }
}

Dataset read_dataset_csv(std::istream& is, std::vector<std::string>* comments) {
    Dataset data;
    std::string line;
    int K = -1;
    std::size_t row = 0;
    std::vector<std::size_t> bad;
    std::string first_problem;

    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        if (line[0] == '#') {
            const std::string body = comment_body(line);
            if (body.rfind("label=", 0) == 0) data.label = body.substr(6);
            if (comments) comments->push_back(body);
            continue;
        }
        const auto f = split(line);
        if (K < 0) {
            const std::size_t n = f.size();
            if (n < 6 || (n - 2) % 2 != 0 || trim(f[0]) != "t" || trim(f.back()) != "income")
                throw CsvError("dataset header must be t,p_1..p_K,x_1..x_K,income");
            K = static_cast<int>((n - 2) / 2);
            for (int k = 1; k <= K; ++k) {
                if (trim(f[k]) != "p_" + std::to_string(k) || trim(f[K + k]) != "x_" + std::to_string(k))
                    throw CsvError("dataset header must be t,p_1..p_K,x_1..x_K,income");
            }
            continue;
        }
        ++row;
        auto fail = [&](const std::string& why) {
            bad.push_back(row);
            if (first_problem.empty()) first_problem = why;
        };
        if (f.size() != static_cast<std::size_t>(2 * K + 2)) {
            fail("expected " + std::to_string(2 * K + 2) + " fields, got " + std::to_string(f.size()));
            continue;
        }
        Observation ob;
        ob.prices.resize(K);
        ob.quantities.resize(K);
        bool ok = true;
        for (int k = 0; k < K && ok; ++k) ok = parse_double(f[1 + k], ob.prices[k]) && ob.prices[k] > 0.0;
        for (int k = 0; k < K && ok; ++k) ok = parse_double(f[1 + K + k], ob.quantities[k]) && ob.quantities[k] >= 0.0;
        ok = ok && parse_double(f.back(), ob.income) && ob.income > 0.0;
        if (!ok) {
            fail("non-numeric or out-of-domain value");
            continue;
        }
        data.observations.push_back(std::move(ob));
    }
    if (K < 0) throw CsvError("dataset has no header");
    if (!bad.empty()) {
        std::ostringstream msg;
        msg << "malformed dataset rows:";
        for (std::size_t i = 0; i < bad.size() && i < 20; ++i) msg << ' ' << bad[i];
        if (bad.size() > 20) msg << " ... (" << bad.size() << " total)";
        msg << " (first problem: " << first_problem << ')';
        throw CsvError(msg.str(), std::move(bad));
    }
    if (data.observations.empty()) throw CsvError("dataset has no rows");
    return data;
}

void write_gamma_csv(std::ostream& os, const GammaTable& table, const std::vector<std::string>& header) {
    write_comments(os, header);
    write_comments(os, table.provenance);
    for (const auto& w : table.warnings) os << "# warning: " << w << '\n';
    os << "eps,gamma,n_pairs_in_A\n";
    for (const auto& r : table.rows)
        os << (std::isinf(r.eps) ? std::string("inf") : format_double(r.eps)) << ',' << format_double(r.gamma) << ','
           << r.n_in_A << '\n';
}

GammaTable read_gamma_csv(std::istream& is) {
    GammaTable t;
    std::string line;
    bool header = false;
    std::size_t row = 0;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        if (line[0] == '#') {
            const std::string body = comment_body(line);
            if (body.rfind("warning: ", 0) == 0)
                t.warnings.push_back(body.substr(9));
            else
                t.provenance.push_back(body);
            continue;
        }
        if (!header) {
            if (trim(line) != "eps,gamma,n_pairs_in_A") throw CsvError("gamma table header must be eps,gamma,n_pairs_in_A");
            header = true;
            continue;
        }
        ++row;
        const auto f = split(line);
        GammaRow r;
        bool ok = f.size() == 3;
        if (ok) {
            if (trim(f[0]) == "inf")
                r.eps = std::numeric_limits<double>::infinity();
            else
                ok = parse_double(f[0], r.eps);
        }
        double n = 0.0;
        ok = ok && parse_double(f[1], r.gamma) && parse_double(f[2], n) && n >= 0.0;
        if (!ok) throw CsvError("malformed gamma table row " + std::to_string(row), {row});
        r.n_in_A = static_cast<std::size_t>(n);
        if (!t.rows.empty() && r.eps < t.rows.back().eps)
            throw CsvError("gamma table eps must be nondecreasing (row " + std::to_string(row) + ")", {row});
        t.rows.push_back(r);
    }
    if (t.rows.empty()) throw CsvError("gamma table has no rows");
    return t;
}

void write_report_csv(std::ostream& os, const TestReport& report, const std::vector<std::string>& header) {
    write_comments(os, header);
    write_comments(os, report.config);
    os << "# gamma_at_zero=" << format_double(report.gamma_at_zero) << '\n';
    for (const auto& n : report.notes) os << "# note: " << n << '\n';
    os << "k,eps,delta,n,restriction_norm,T_n,skipped,decision\n";
    for (const auto& r : report.rows) {
        os << r.k << ',' << format_double(r.eps) << ',' << format_double(r.delta) << ',' << r.n << ','
           << format_double(r.norm) << ',' << format_double(r.T) << ',' << r.skipped << ','
           << (r.rejected ? "reject" : "continue") << '\n';
    }
    os << "# verdict=" << to_string(report.verdict) << '\n';
}

std::string format_report_table(const TestReport& report) {
    std::ostringstream os;
    char buf[160];
    std::snprintf(buf, sizeof buf, "%3s %10s %10s %10s %13s %11s  %s\n", "k", "eps", "delta", "n", "norm", "T_n",
                  "decision");
    os << buf;
    for (const auto& r : report.rows) {
        std::snprintf(buf, sizeof buf, "%3d %10.4g %10.4g %10zu %13.5g %11.5g  %s\n", r.k, r.eps, r.delta, r.n, r.norm,
                      r.T, r.rejected ? "reject" : "continue");
        os << buf;
    }
    os << "verdict: " << to_string(report.verdict) << '\n';
    for (const auto& n : report.notes) os << "note: " << n << '\n';
    return os.str();
}

}  // namespace pactest
