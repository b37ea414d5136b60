#include "uatpc/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "uatpc/errors.hpp"

namespace uatpc {

using nlohmann::json;

namespace {

std::vector<std::string_view> split_lines(std::string_view text)
{
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) {
            end = text.size();
        }
        auto line = text.substr(start, end - start);
        if (!line.empty() && line.back() == '\r') {
            line.remove_suffix(1);
        }
        lines.push_back(line);
        start = end + 1;
    }
    return lines;
}

bool is_blank(std::string_view s)
{
    return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

std::string_view trim(std::string_view s)
{
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
        s.remove_prefix(1);
    }
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
        s.remove_suffix(1);
    }
    return s;
}

std::vector<std::string_view> split_csv(std::string_view line)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        auto comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            out.push_back(trim(line.substr(start)));
            break;
        }
        out.push_back(trim(line.substr(start, comma - start)));
        start = comma + 1;
    }
    return out;
}

template <typename T>
bool parse_number(std::string_view s, T& out)
{
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size();
}

// Empty string when the record is valid.
std::string record_problem(const MeasurementRecord& rec, const NetworkInstance* topology)
{
    if (rec.pl.empty()) {
        return "no path-loss entries";
    }
    for (const auto& [ap, value] : rec.pl) {
        if (!std::isfinite(value) || value < 0.0) {
            return "invalid path loss for " + ap;
        }
    }
    if (!rec.pl.contains(rec.serving_ap)) {
        return "serving not measured";
    }
    if (topology != nullptr) {
        for (const auto& [ap, value] : rec.pl) {
            if (topology->index_of(ap) == topology->size()) {
                return "unknown AP " + ap;
            }
        }
    }
    return {};
}

} // namespace

MeasurementFormat parse_format(std::string_view name)
{
    if (name == "jsonl") {
        return MeasurementFormat::jsonl;
    }
    if (name == "csv") {
        return MeasurementFormat::csv;
    }
    throw ValidationError("unknown measurement format: " + std::string(name));
}

std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ValidationError("cannot read file: " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view content)
{
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error("cannot write file: " + path.string());
    }
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
}

std::string format_double(double value)
{
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, ptr);
}

ParseResult parse_measurements_jsonl(std::string_view text, const NetworkInstance* topology)
{
    ParseResult result;
    auto lines = split_lines(text);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (is_blank(lines[i])) {
            continue;
        }
        ++result.lines_read;
        const std::size_t line_no = i + 1;
        MeasurementRecord rec;
        try {
            auto j = json::parse(lines[i]);
            rec.timestamp = j.at("ts").get<std::int64_t>();
            rec.sta_id = j.at("sta").get<std::string>();
            rec.serving_ap = j.at("serving").get<std::string>();
            for (const auto& [ap, value] : j.at("pl").items()) {
                rec.pl[ap] = value.get<double>();
            }
        } catch (const json::exception& e) {
            result.rejects.push_back({line_no, std::string("malformed: ") + e.what()});
            continue;
        }
        if (auto problem = record_problem(rec, topology); !problem.empty()) {
            result.rejects.push_back({line_no, problem});
            continue;
        }
        ++result.lines_accepted;
        result.records.push_back(std::move(rec));
    }
    return result;
}

ParseResult parse_measurements_csv(std::string_view text, const NetworkInstance* topology)
{
    ParseResult result;
    auto lines = split_lines(text);

    struct Group {
        MeasurementRecord rec;
        std::vector<std::size_t> lines;
        std::string problem;
    };
    std::vector<Group> groups;

    bool header_seen = false;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (is_blank(lines[i])) {
            continue;
        }
        auto fields = split_csv(lines[i]);
        if (!header_seen) {
            header_seen = true;
            if (!fields.empty() && fields[0] == "ts") {
                continue;
            }
        }
        ++result.lines_read;
        const std::size_t line_no = i + 1;
        std::int64_t ts = 0;
        double pl = 0.0;
        if (fields.size() != 5 || !parse_number(fields[0], ts) || !parse_number(fields[4], pl) ||
            fields[1].empty() || fields[2].empty() || fields[3].empty()) {
            result.rejects.push_back({line_no, "malformed: expected ts,sta,serving,ap_id,pl_db"});
            continue;
        }
        const bool continues = !groups.empty() && groups.back().rec.timestamp == ts &&
                               groups.back().rec.sta_id == fields[1] && groups.back().rec.serving_ap == fields[2];
        if (!continues) {
            Group g;
            g.rec.timestamp = ts;
            g.rec.sta_id = std::string(fields[1]);
            g.rec.serving_ap = std::string(fields[2]);
            groups.push_back(std::move(g));
        }
        auto& g = groups.back();
        g.lines.push_back(line_no);
        auto [it, inserted] = g.rec.pl.emplace(std::string(fields[3]), pl);
        if (!inserted && g.problem.empty()) {
            g.problem = "duplicate reading for " + it->first;
        }
    }

    for (auto& g : groups) {
        auto problem = g.problem.empty() ? record_problem(g.rec, topology) : g.problem;
        if (!problem.empty()) {
            for (auto line : g.lines) {
                result.rejects.push_back({line, problem});
            }
            continue;
        }
        result.lines_accepted += g.lines.size();
        result.records.push_back(std::move(g.rec));
    }
    std::sort(result.rejects.begin(), result.rejects.end(),
              [](const RejectedLine& a, const RejectedLine& b) { return a.line < b.line; });
    return result;
}

ParseResult parse_measurements(const std::filesystem::path& path, MeasurementFormat format,
                               const NetworkInstance* topology)
{
    auto text = read_file(path);
    return format == MeasurementFormat::jsonl ? parse_measurements_jsonl(text, topology)
                                              : parse_measurements_csv(text, topology);
}

std::string measurement_to_jsonl(const MeasurementRecord& record)
{
    json j;
    j["ts"] = record.timestamp;
    j["sta"] = record.sta_id;
    j["serving"] = record.serving_ap;
    j["pl"] = json::object();
    for (const auto& [ap, value] : record.pl) {
        j["pl"][ap] = value;
    }
    return j.dump();
}

void write_measurements_jsonl(const std::filesystem::path& path, const std::vector<MeasurementRecord>& records)
{
    std::string out;
    for (const auto& r : records) {
        out += measurement_to_jsonl(r);
        out += '\n';
    }
    write_file(path, out);
}

// ---------------------------------------------------------------------------
// Topology

NetworkInstance::NetworkInstance(std::vector<AccessPoint> aps, Matrix ap_pl, std::vector<std::vector<bool>> overlap)
    : aps_(std::move(aps)), ap_pl_(std::move(ap_pl)), overlap_(std::move(overlap))
{
    const auto n = aps_.size();
    std::set<std::string> seen;
    for (const auto& ap : aps_) {
        if (!seen.insert(ap.id).second) {
            throw ValidationError("duplicate AP id: " + ap.id);
        }
        if (ap.allowed_levels.empty()) {
            throw ValidationError("AP " + ap.id + " has empty allowed_levels");
        }
        if (!std::is_sorted(ap.allowed_levels.begin(), ap.allowed_levels.end(), std::less_equal<>{})) {
            throw ValidationError("AP " + ap.id + " allowed_levels must be strictly increasing");
        }
    }
    if (ap_pl_.rows() != n || ap_pl_.cols() != n) {
        throw ValidationError("ap_pl must be " + std::to_string(n) + "x" + std::to_string(n));
    }
    for (std::size_t a = 0; a < n; ++a) {
        if (ap_pl_(a, a) != 0.0) {
            throw ValidationError("ap_pl diagonal must be zero");
        }
        for (std::size_t b = 0; b < n; ++b) {
            if (!std::isfinite(ap_pl_(a, b)) || ap_pl_(a, b) < 0.0 || ap_pl_(a, b) != ap_pl_(b, a)) {
                throw ValidationError("ap_pl must be finite, non-negative and symmetric");
            }
        }
    }
    if (overlap_.size() != n) {
        throw ValidationError("channel_overlap must be square over the AP set");
    }
    for (std::size_t a = 0; a < n; ++a) {
        if (overlap_[a].size() != n) {
            throw ValidationError("channel_overlap must be square over the AP set");
        }
        if (!overlap_[a][a]) {
            throw ValidationError("channel_overlap diagonal must be true");
        }
        for (std::size_t b = 0; b < a; ++b) {
            if (overlap_[a][b] != overlap_[b][a]) {
                throw ValidationError("channel_overlap must be symmetric");
            }
        }
    }
}

namespace {

std::vector<std::vector<bool>> overlap_from_channels(const std::vector<AccessPoint>& aps)
{
    std::vector<std::vector<bool>> ov(aps.size(), std::vector<bool>(aps.size()));
    for (std::size_t a = 0; a < aps.size(); ++a) {
        for (std::size_t b = 0; b < aps.size(); ++b) {
            ov[a][b] = aps[a].channel == aps[b].channel;
        }
    }
    return ov;
}

} // namespace

NetworkInstance::NetworkInstance(std::vector<AccessPoint> aps, Matrix ap_pl)
    : NetworkInstance(aps, std::move(ap_pl), overlap_from_channels(aps))
{
}

std::size_t NetworkInstance::index_of(const std::string& id) const
{
    for (std::size_t a = 0; a < aps_.size(); ++a) {
        if (aps_[a].id == id) {
            return a;
        }
    }
    return aps_.size();
}

std::vector<std::string> NetworkInstance::ids() const
{
    std::vector<std::string> out;
    out.reserve(aps_.size());
    for (const auto& ap : aps_) {
        out.push_back(ap.id);
    }
    return out;
}

void ReferencePointSet::validate(std::size_t n_aps) const
{
    if (rp_pl.cols() != n_aps) {
        throw ValidationError("reference points have " + std::to_string(rp_pl.cols()) + " columns, expected " +
                              std::to_string(n_aps));
    }
    if (!origin_ids.empty() && origin_ids.size() != rp_pl.rows()) {
        throw ValidationError("origin_ids length does not match RP count");
    }
    for (double v : rp_pl.data()) {
        if (!std::isfinite(v) || v < 0.0) {
            throw ValidationError("reference point path loss must be finite and non-negative");
        }
    }
}

void check_feasible(const NetworkInstance& instance, const PowerConfig& config)
{
    if (config.levels.size() != instance.size()) {
        throw ValidationError("power config has " + std::to_string(config.levels.size()) + " levels for " +
                              std::to_string(instance.size()) + " APs");
    }
    for (std::size_t a = 0; a < instance.size(); ++a) {
        const auto& allowed = instance.ap(a).allowed_levels;
        if (!std::binary_search(allowed.begin(), allowed.end(), config.levels[a])) {
            throw ValidationError("level " + std::to_string(config.levels[a]) + " not allowed for AP " +
                                  instance.ap(a).id);
        }
    }
}

Matrix symmetrize_ap_pl(const std::vector<std::vector<double>>& directed, double missing_pl_db)
{
    const auto n = directed.size();
    for (const auto& row : directed) {
        if (row.size() != n) {
            throw ValidationError("ap_pl must be square");
        }
    }
    Matrix out(n, n);
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = 0; b < n; ++b) {
            if (a == b) {
                continue;
            }
            const double ab = directed[a][b];
            const double ba = directed[b][a];
            const bool has_ab = !std::isnan(ab);
            const bool has_ba = !std::isnan(ba);
            if (has_ab && has_ba) {
                out(a, b) = 0.5 * (ab + ba);
            } else if (has_ab) {
                out(a, b) = ab;
            } else if (has_ba) {
                out(a, b) = ba;
            } else {
                out(a, b) = missing_pl_db;
            }
        }
    }
    return out;
}

NetworkInstance parse_instance(std::string_view json_text)
{
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ValidationError(std::string("topology is not valid JSON: ") + e.what());
    }
    try {
        std::vector<AccessPoint> aps;
        for (const auto& ja : j.at("aps")) {
            AccessPoint ap;
            ap.id = ja.at("id").get<std::string>();
            ap.allowed_levels = ja.at("allowed_levels_dbm").get<std::vector<int>>();
            ap.channel = ja.value("channel", 0);
            aps.push_back(std::move(ap));
        }
        const auto n = aps.size();
        const auto& jpl = j.at("ap_pl");
        if (jpl.size() != n) {
            throw ValidationError("ap_pl must be " + std::to_string(n) + "x" + std::to_string(n));
        }
        std::vector<std::vector<double>> directed(n);
        for (std::size_t a = 0; a < n; ++a) {
            if (jpl[a].size() != n) {
                throw ValidationError("ap_pl must be square");
            }
            for (const auto& v : jpl[a]) {
                directed[a].push_back(v.is_null() ? std::nan("") : v.get<double>());
            }
        }
        auto ap_pl = symmetrize_ap_pl(directed);
        if (j.contains("channel_overlap")) {
            auto ov = j.at("channel_overlap").get<std::vector<std::vector<bool>>>();
            return NetworkInstance(std::move(aps), std::move(ap_pl), std::move(ov));
        }
        return NetworkInstance(std::move(aps), std::move(ap_pl));
    } catch (const json::exception& e) {
        throw ValidationError(std::string("topology schema error: ") + e.what());
    }
}

NetworkInstance load_instance(const std::filesystem::path& topology_path)
{
    return parse_instance(read_file(topology_path));
}

std::string instance_to_json(const NetworkInstance& instance)
{
    json j;
    j["aps"] = json::array();
    for (const auto& ap : instance.aps()) {
        j["aps"].push_back({{"id", ap.id}, {"allowed_levels_dbm", ap.allowed_levels}, {"channel", ap.channel}});
    }
    json pl = json::array();
    for (std::size_t a = 0; a < instance.size(); ++a) {
        auto row = instance.ap_pl().row(a);
        pl.push_back(std::vector<double>(row.begin(), row.end()));
    }
    j["ap_pl"] = std::move(pl);
    j["channel_overlap"] = instance.channel_overlap();
    return j.dump(2);
}

void save_instance(const std::filesystem::path& path, const NetworkInstance& instance)
{
    write_file(path, instance_to_json(instance) + "\n");
}

std::string power_config_to_json(const NetworkInstance& instance, const PowerConfig& config)
{
    check_feasible(instance, config);
    json levels = json::object();
    for (std::size_t a = 0; a < instance.size(); ++a) {
        levels[instance.ap(a).id] = config.levels[a];
    }
    return json{{"levels_dbm", levels}}.dump(2);
}

PowerConfig parse_power_config(const NetworkInstance& instance, std::string_view json_text)
{
    PowerConfig config;
    try {
        auto j = json::parse(json_text);
        const auto& levels = j.at("levels_dbm");
        if (levels.size() != instance.size()) {
            throw ValidationError("power config must name every AP exactly once");
        }
        for (const auto& ap : instance.aps()) {
            config.levels.push_back(levels.at(ap.id).get<int>());
        }
    } catch (const json::exception& e) {
        throw ValidationError(std::string("power config schema error: ") + e.what());
    }
    check_feasible(instance, config);
    return config;
}

PowerConfig load_power_config(const NetworkInstance& instance, const std::filesystem::path& path)
{
    return parse_power_config(instance, read_file(path));
}

std::string rps_to_csv(const NetworkInstance& instance, const ReferencePointSet& rps)
{
    rps.validate(instance.size());
    std::string out = "origin_id";
    for (const auto& ap : instance.aps()) {
        out += ',' + ap.id;
    }
    out += '\n';
    for (std::size_t r = 0; r < rps.size(); ++r) {
        out += rps.origin_ids.empty() ? std::to_string(r) : rps.origin_ids[r];
        for (double v : rps.rp_pl.row(r)) {
            out += ',' + format_double(v);
        }
        out += '\n';
    }
    return out;
}

void save_rps_csv(const std::filesystem::path& path, const NetworkInstance& instance, const ReferencePointSet& rps)
{
    write_file(path, rps_to_csv(instance, rps));
}

ReferencePointSet load_rps_csv(const std::filesystem::path& path, const NetworkInstance& instance)
{
    auto text = read_file(path);
    auto lines = split_lines(text);
    std::vector<std::size_t> column_of; // csv column -> AP index
    std::vector<std::vector<double>> rows;
    ReferencePointSet rps;
    bool header = true;
    for (auto line : lines) {
        if (is_blank(line)) {
            continue;
        }
        auto fields = split_csv(line);
        if (header) {
            header = false;
            if (fields.size() != instance.size() + 1) {
                throw ValidationError("RP CSV must have one column per AP plus origin_id");
            }
            for (std::size_t c = 1; c < fields.size(); ++c) {
                auto idx = instance.index_of(std::string(fields[c]));
                if (idx == instance.size()) {
                    throw ValidationError("RP CSV names unknown AP " + std::string(fields[c]));
                }
                column_of.push_back(idx);
            }
            continue;
        }
        if (fields.size() != instance.size() + 1) {
            throw ValidationError("RP CSV row has wrong column count");
        }
        std::vector<double> row(instance.size());
        for (std::size_t c = 1; c < fields.size(); ++c) {
            if (!parse_number(fields[c], row[column_of[c - 1]])) {
                throw ValidationError("RP CSV has a non-numeric path loss");
            }
        }
        rps.origin_ids.emplace_back(fields[0]);
        rows.push_back(std::move(row));
    }
    rps.rp_pl = Matrix(rows.size(), instance.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        std::copy(rows[r].begin(), rows[r].end(), rps.rp_pl.row(r).begin());
    }
    rps.validate(instance.size());
    return rps;
}

} // namespace uatpc
