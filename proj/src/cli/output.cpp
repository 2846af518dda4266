#include "sslab/cli.hpp"

#include <cmath>
#include <cstdio>

namespace sslab::cli {

namespace {

std::string csv_field(const nlohmann::json& v)
{
    if (v.is_number_float()) {
        const double d = v.get<double>();
        if (std::isnan(d))
            return "nan";
        if (std::isinf(d))
            return d > 0 ? "inf" : "-inf";
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", d);
        return buf;
    }
    if (v.is_number_integer() || v.is_number_unsigned())
        return v.dump();
    if (v.is_boolean())
        return v.get<bool>() ? "true" : "false";
    if (v.is_null())
        return "";
    const std::string s = v.is_string() ? v.get<std::string>() : v.dump();
    if (s.find_first_of(",\"\r\n") == std::string::npos)
        return s;
    std::string q = "\"";
    for (char ch : s) {
        if (ch == '"')
            q += '"';
        q += ch;
    }
    return q + "\"";
}

// nlohmann refuses NaN/inf; they become strings
nlohmann::json json_safe(const nlohmann::json& v)
{
    if (v.is_number_float() && !std::isfinite(v.get<double>()))
        return csv_field(v);
    return v;
}

} // namespace

std::string to_csv(const ResultRecord& r)
{
    const std::string hash = config_hash(r.config);
    std::string out;
    for (const auto& n : r.notes)
        out += "# " + n + "\n";
    for (std::size_t i = 0; i < r.columns.size(); ++i)
        out += r.columns[i] + ",";
    out += "config_hash\n";
    for (const auto& row : r.rows) {
        for (const auto& v : row)
            out += csv_field(v) + ",";
        out += hash + "\n";
    }
    return out;
}

std::string to_json(const ResultRecord& r)
{
    nlohmann::json j;
    j["command"] = r.command;
    j["provenance"] = {{"version", kVersion}, {"config_hash", config_hash(r.config)},
                       {"config", canonical(r.config)}};
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : r.rows) {
        nlohmann::json obj = nlohmann::json::object();
        for (std::size_t i = 0; i < r.columns.size() && i < row.size(); ++i)
            obj[r.columns[i]] = json_safe(row[i]);
        rows.push_back(obj);
    }
    j["rows"] = rows;
    j["notes"] = r.notes;
    if (!r.extra.empty())
        j["extra"] = r.extra;
    return j.dump(2) + "\n";
}

std::string render(const ResultRecord& r)
{
    std::string fmt = r.config.format;
    if (fmt.empty())
        fmt = r.command == "verify" ? "json" : "csv";
    return fmt == "json" ? to_json(r) : to_csv(r);
}

} // namespace sslab::cli
