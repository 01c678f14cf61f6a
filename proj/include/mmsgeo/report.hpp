#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace mmsgeo {

// One checked statement. `anchor` names the mathematical statement the check
// exercises; `relation` is "<=", ">=", "==" or "~=" (within tolerance).
struct Verdict {
    std::string name;
    std::string anchor;
    std::string relation;
    double measured = 0.0;
    double bound = 0.0;
    double tolerance = 0.0;
    double slack = 0.0;
    bool pass = false;
    // Expected failures and diagnostics that do not gate the exit status.
    bool informational = false;
    std::string note;
};

struct Table {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    void write_csv(std::ostream& out) const;
    std::string csv() const;
};

struct Report {
    std::string title;
    std::vector<Verdict> verdicts;
    std::vector<std::pair<std::string, double>> values;
    std::vector<Table> tables;
    std::vector<std::string> notes;

    // measured <= bound + tolerance
    Verdict& check_le(const std::string& name, const std::string& anchor, double measured, double bound,
                      double tolerance = 0.0);
    // measured >= bound - tolerance
    Verdict& check_ge(const std::string& name, const std::string& anchor, double measured, double bound,
                      double tolerance = 0.0);
    // |measured - target| <= tolerance
    Verdict& check_close(const std::string& name, const std::string& anchor, double measured, double target,
                         double tolerance);
    Verdict& check_true(const std::string& name, const std::string& anchor, bool ok, double measured = 0.0);

    void set_value(const std::string& key, double v);
    double value(const std::string& key) const;
    bool has_value(const std::string& key) const;
    const Verdict* find(const std::string& name) const;
    const Table* table(const std::string& name) const;

    bool passed() const;
    std::size_t failures() const;
    void merge(const Report& other, const std::string& prefix = "");

    nlohmann::json to_json() const;
    // Verdict table as CSV: name,anchor,relation,measured,bound,tolerance,slack,pass,informational
    std::string verdicts_csv() const;
};

}  // namespace mmsgeo
