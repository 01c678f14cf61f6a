#include "mmsgeo/report.hpp"

#include <cmath>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "mmsgeo/csv.hpp"

namespace mmsgeo {

namespace {

// JSON has no inf/nan; encode them as strings.
nlohmann::json number(double v) {
    if (std::isfinite(v)) return v;
    return csv::format_number(v);
}

}  // namespace

void Table::write_csv(std::ostream& out) const {
    csv::write_row(out, columns);
    std::vector<std::string> cells;
    for (const auto& row : rows) {
        cells.clear();
        for (double v : row) cells.push_back(csv::format_number(v));
        csv::write_row(out, cells);
    }
}

std::string Table::csv() const {
    std::ostringstream os;
    write_csv(os);
    return os.str();
}

Verdict& Report::check_le(const std::string& name, const std::string& anchor, double measured, double bound,
                          double tolerance) {
    Verdict v{name, anchor, "<=", measured, bound, tolerance, bound + tolerance - measured, false, false, {}};
    v.pass = measured <= bound + tolerance;
    verdicts.push_back(v);
    return verdicts.back();
}

Verdict& Report::check_ge(const std::string& name, const std::string& anchor, double measured, double bound,
                          double tolerance) {
    Verdict v{name, anchor, ">=", measured, bound, tolerance, measured - (bound - tolerance), false, false, {}};
    v.pass = measured >= bound - tolerance;
    verdicts.push_back(v);
    return verdicts.back();
}

Verdict& Report::check_close(const std::string& name, const std::string& anchor, double measured, double target,
                             double tolerance) {
    const double dev = std::abs(measured - target);
    Verdict v{name, anchor, "~=", measured, target, tolerance, tolerance - dev, false, false, {}};
    v.pass = dev <= tolerance;
    verdicts.push_back(v);
    return verdicts.back();
}

Verdict& Report::check_true(const std::string& name, const std::string& anchor, bool ok, double measured) {
    Verdict v{name, anchor, "==", measured, 0.0, 0.0, ok ? 0.0 : -1.0, ok, false, {}};
    verdicts.push_back(v);
    return verdicts.back();
}

void Report::set_value(const std::string& key, double v) {
    for (auto& kv : values) {
        if (kv.first == key) {
            kv.second = v;
            return;
        }
    }
    values.emplace_back(key, v);
}

double Report::value(const std::string& key) const {
    for (const auto& kv : values)
        if (kv.first == key) return kv.second;
    throw std::out_of_range("report has no value '" + key + "'");
}

bool Report::has_value(const std::string& key) const {
    for (const auto& kv : values)
        if (kv.first == key) return true;
    return false;
}

const Verdict* Report::find(const std::string& name) const {
    for (const auto& v : verdicts)
        if (v.name == name) return &v;
    return nullptr;
}

const Table* Report::table(const std::string& name) const {
    for (const auto& t : tables)
        if (t.name == name) return &t;
    return nullptr;
}

bool Report::passed() const { return failures() == 0; }

std::size_t Report::failures() const {
    std::size_t n = 0;
    for (const auto& v : verdicts)
        if (!v.pass && !v.informational) ++n;
    return n;
}

void Report::merge(const Report& other, const std::string& prefix) {
    for (Verdict v : other.verdicts) {
        v.name = prefix + v.name;
        verdicts.push_back(std::move(v));
    }
    for (const auto& [k, v] : other.values) set_value(prefix + k, v);
    for (Table t : other.tables) {
        t.name = prefix + t.name;
        tables.push_back(std::move(t));
    }
    for (const auto& n : other.notes) notes.push_back(prefix + n);
}

nlohmann::json Report::to_json() const {
    nlohmann::json j;
    j["title"] = title;
    j["passed"] = passed();
    j["failures"] = failures();
    auto& vs = j["verdicts"] = nlohmann::json::array();
    for (const auto& v : verdicts) {
        vs.push_back({{"name", v.name},
                      {"anchor", v.anchor},
                      {"relation", v.relation},
                      {"measured", number(v.measured)},
                      {"bound", number(v.bound)},
                      {"tolerance", number(v.tolerance)},
                      {"slack", number(v.slack)},
                      {"pass", v.pass},
                      {"informational", v.informational},
                      {"note", v.note}});
    }
    auto& vals = j["values"] = nlohmann::json::object();
    for (const auto& [k, v] : values) vals[k] = number(v);
    auto& tabs = j["tables"] = nlohmann::json::array();
    for (const auto& t : tables) tabs.push_back({{"name", t.name}, {"rows", t.rows.size()}});
    j["notes"] = notes;
    return j;
}

std::string Report::verdicts_csv() const {
    std::ostringstream os;
    const std::vector<std::string> header{"name", "anchor", "relation", "measured", "bound",
                                          "tolerance", "slack", "pass", "informational"};
    csv::write_row(os, header);
    for (const auto& v : verdicts) {
        const std::vector<std::string> row{v.name,
                                           v.anchor,
                                           v.relation,
                                           csv::format_number(v.measured),
                                           csv::format_number(v.bound),
                                           csv::format_number(v.tolerance),
                                           csv::format_number(v.slack),
                                           v.pass ? "1" : "0",
                                           v.informational ? "1" : "0"};
        csv::write_row(os, row);
    }
    return os.str();
}

}  // namespace mmsgeo
