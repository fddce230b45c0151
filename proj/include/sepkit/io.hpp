#pragma once

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "sepkit/closedforms.hpp"
#include "sepkit/errors.hpp"
#include "sepkit/prec_real.hpp"
#include "sepkit/rational.hpp"

namespace sepkit {

using Json = nlohmann::ordered_json;

/// A number as it leaves the program: exact ("p/q") or approximate (decimal
/// string plus the count of certified significant digits).
struct TaggedValue {
    std::string text;
    bool exact = false;
    int certified_digits = 0;
    std::string standard_error; // set for statistical estimates

    static TaggedValue of(const BigRational& q) { return {to_string(q), true, 0, {}}; }

    static TaggedValue of(const PrecReal& x)
    {
        const int cd = x.certified_digits.value_or(0);
        return {to_decimal(x.value, std::max(cd, 6)), false, cd, {}};
    }

    /// Statistical estimate: no certified digits, standard error attached.
    static TaggedValue estimate(double value, double se)
    {
        std::ostringstream v, s;
        v.precision(10);
        s.precision(3);
        v << value;
        s << se;
        return {v.str(), false, 0, s.str()};
    }

    Json to_json() const
    {
        Json j;
        j["kind"] = exact ? "exact" : "approximate";
        j["value"] = text;
        if (!exact) {
            j["certified_digits"] = certified_digits;
        }
        if (!standard_error.empty()) {
            j["standard_error"] = standard_error;
        }
        return j;
    }

    /// Single-line form for text output.
    std::string to_text() const
    {
        if (exact) {
            return text;
        }
        std::string out = text + " (certified_digits=" + std::to_string(certified_digits);
        if (!standard_error.empty()) {
            out += ", standard_error=" + standard_error;
        }
        return out + ")";
    }
};

inline Json tagged(const BigRational& q) { return TaggedValue::of(q).to_json(); }
inline Json tagged(const PrecReal& x) { return TaggedValue::of(x).to_json(); }

// ---- CSV (RFC 4180) ----

inline std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\r\n") == std::string::npos) {
        return s;
    }
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

inline void write_csv_row(std::ostream& os, const std::vector<std::string>& fields)
{
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) os << ',';
        os << csv_field(fields[i]);
    }
    os << "\r\n";
}

/// Table whose numeric cells carry a companion "<column>_certified_digits"
/// cell holding either "exact" or the digit count.
class TaggedTable {
public:
    explicit TaggedTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}

    void add_row(std::vector<TaggedValue> row)
    {
        if (row.size() != columns_.size()) {
            throw DomainError("row width does not match the table header");
        }
        rows_.push_back(std::move(row));
    }

    void write_csv(std::ostream& os) const
    {
        std::vector<std::string> header;
        for (const auto& c : columns_) {
            header.push_back(c);
            header.push_back(c + "_certified_digits");
        }
        write_csv_row(os, header);
        for (const auto& row : rows_) {
            std::vector<std::string> cells;
            for (const auto& v : row) {
                cells.push_back(v.text);
                cells.push_back(v.exact ? "exact" : std::to_string(v.certified_digits));
            }
            write_csv_row(os, cells);
        }
    }

    Json to_json() const
    {
        Json rows = Json::array();
        for (const auto& row : rows_) {
            Json r;
            for (std::size_t i = 0; i < columns_.size(); ++i) {
                r[columns_[i]] = row[i].to_json();
            }
            rows.push_back(std::move(r));
        }
        return rows;
    }

    const std::vector<std::string>& columns() const { return columns_; }
    const std::vector<std::vector<TaggedValue>>& rows() const { return rows_; }

private:
    std::vector<std::string> columns_;
    std::vector<std::vector<TaggedValue>> rows_;
};

/// RFC 4180 reader; returns records as vectors of fields.
inline std::vector<std::vector<std::string>> read_csv(std::istream& is)
{
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> record;
    std::string field;
    bool quoted = false, any = false;
    char c;
    auto end_record = [&] {
        if (any || !field.empty() || !record.empty()) {
            record.push_back(std::move(field));
            records.push_back(std::move(record));
        }
        record.clear();
        field.clear();
        any = false;
    };
    while (is.get(c)) {
        if (quoted) {
            if (c == '"') {
                if (is.peek() == '"') {
                    is.get(c);
                    field += '"';
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
            continue;
        }
        if (c == '"') {
            quoted = true;
            any = true;
        } else if (c == ',') {
            record.push_back(std::move(field));
            field.clear();
            any = true;
        } else if (c == '\n') {
            end_record();
        } else if (c != '\r') {
            field += c;
        }
    }
    if (quoted) {
        throw ParseError("unterminated quoted CSV field");
    }
    end_record();
    return records;
}

/// (α, value) pairs from a two-column CSV (header optional) or a JSON array of
/// {"alpha": ..., "value": ...} objects. Values are exact rationals.
inline std::vector<std::pair<BigRational, BigRational>> read_points(std::istream& is)
{
    std::string text((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    std::vector<std::pair<BigRational, BigRational>> pts;
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '[') {
        Json j;
        try {
            j = Json::parse(text);
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(std::string("points JSON: ") + e.what());
        }
        for (const auto& item : j) {
            auto field = [&](const char* name) {
                if (!item.contains(name)) {
                    throw ParseError(std::string("points JSON entry lacks '") + name + "'");
                }
                const auto& v = item[name];
                return parse_rational(v.is_string() ? v.get<std::string>() : v.dump());
            };
            pts.emplace_back(field("alpha"), field("value"));
        }
        return pts;
    }
    std::istringstream ss(text);
    auto records = read_csv(ss);
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& r = records[i];
        if (r.size() < 2) {
            throw ParseError("points CSV row " + std::to_string(i + 1) + " has fewer than two fields");
        }
        if (i == 0 && r[0].find_first_of("0123456789") == std::string::npos) {
            continue; // header
        }
        pts.emplace_back(parse_rational(r[0]), parse_rational(r[1]));
    }
    return pts;
}

/// Weight polynomials for a G2 decomposition, transcribed by the user:
///
///   { "k": 0,
///     "terms": [ { "extra_upper_twos": 0, "minus_one": false,
///                  "weight": ["3", "-1/2", "7"] } ] }
///
/// "weight" holds ascending coefficients in α (integers or "p/q" strings).
inline WeightedHypergeometricSum parse_weights(const Json& j, int& k_out)
{
    try {
        k_out = j.at("k").get<int>();
        WeightedHypergeometricSum ws;
        for (const auto& t : j.at("terms")) {
            std::vector<BigRational> coeffs;
            for (const auto& c : t.at("weight")) {
                coeffs.push_back(parse_rational(c.is_string() ? c.get<std::string>() : c.dump()));
            }
            const int twos = t.value("extra_upper_twos", 0);
            const bool minus_one = t.value("minus_one", false);
            ws.terms.push_back({Polynomial(std::move(coeffs)), family_member(k_out, twos, minus_one)});
        }
        return ws;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("weights JSON: ") + e.what());
    }
}

} // namespace sepkit
