#pragma once
// Parsing of per-submission logs (JSONL, CSV), corpus manifests, command
// renaming and optional removal of truncated submissions.
//
// Other recorder formats plug in by producing an EventLog and registering
// a LogParser under a new format tag.

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "logplag/core.hpp"
#include "logplag/detail/random.hpp"

namespace logplag {

class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

using RenameMap = std::map<CommandType, CommandType>;

namespace detail {

inline std::optional<std::int64_t> parse_int64(std::string_view s) {
    std::int64_t v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw Error("cannot open '" + p.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct CsvRow {
    std::size_t line;
    std::vector<std::string> fields;
};

/// RFC-4180 reader: quoted fields may hold commas, doubled quotes and line
/// breaks. Blank lines are skipped.
inline std::vector<CsvRow> read_csv_rows(std::string_view text) {
    std::vector<CsvRow> rows;
    std::vector<std::string> fields;
    std::string field;
    bool in_quotes = false;
    bool field_started = false;
    std::size_t line = 1;
    std::size_t row_line = 1;

    auto end_row = [&] {
        if (field_started || !fields.empty()) {
            fields.push_back(std::move(field));
            rows.push_back({row_line, std::move(fields)});
        }
        fields.clear();
        field.clear();
        field_started = false;
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                if (c == '\n') ++line;
                field += c;
            }
            continue;
        }
        switch (c) {
        case '"':
            if (!field.empty()) throw ParseError(line, "stray quote inside unquoted field");
            in_quotes = true;
            field_started = true;
            break;
        case ',':
            fields.push_back(std::move(field));
            field.clear();
            field_started = true;
            break;
        case '\r':
            break;
        case '\n':
            end_row();
            ++line;
            row_line = line;
            break;
        default:
            field += c;
            field_started = true;
        }
    }
    if (in_quotes) throw ParseError(row_line, "unterminated quoted field");
    end_row();
    return rows;
}

}  // namespace detail

/// One JSON object per line: {"t": <int ms, optional>, "cmd": <string>,
/// "args": <object, optional>}. Blank lines are ignored.
inline EventLog parse_jsonl(std::string_view text, std::string log_id = {}) {
    EventLog log{std::move(log_id), {}};
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        auto line = text.substr(pos, nl - pos);
        pos = nl + 1;
        ++line_no;
        if (trim(line).empty()) {
            if (nl == text.size()) break;
            continue;
        }

        nlohmann::json obj;
        try {
            obj = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw ParseError(line_no, std::string("malformed JSON: ") + e.what());
        }
        if (!obj.is_object()) throw ParseError(line_no, "expected a JSON object");

        const auto cmd = obj.find("cmd");
        if (cmd == obj.end()) throw ParseError(line_no, "missing \"cmd\" field");
        if (!cmd->is_string()) throw ParseError(line_no, "\"cmd\" must be a string");
        const auto command = trim(cmd->get_ref<const std::string&>());
        if (command.empty()) throw ParseError(line_no, "\"cmd\" is empty");

        EventRecord rec;
        rec.command_type = command;
        if (const auto t = obj.find("t"); t != obj.end() && !t->is_null()) {
            if (!t->is_number_integer()) throw ParseError(line_no, "\"t\" must be an integer");
            rec.timestamp = t->get<std::int64_t>();
        }
        if (const auto args = obj.find("args"); args != obj.end() && !args->is_null()) {
            if (!args->is_object()) throw ParseError(line_no, "\"args\" must be an object");
            for (const auto& [k, v] : args->items())
                rec.payload.emplace(k, v.is_string() ? v.get<std::string>() : v.dump());
        }
        log.records.push_back(std::move(rec));
        if (nl == text.size()) break;
    }
    return log;
}

/// CSV with a header row naming at least a `cmd` column; `t` is optional.
/// Any other column is kept as payload.
inline EventLog parse_csv(std::string_view text, std::string log_id = {}) {
    EventLog log{std::move(log_id), {}};
    const auto rows = detail::read_csv_rows(text);
    if (rows.empty()) throw ParseError(1, "missing header row");

    const auto& header = rows.front().fields;
    std::optional<std::size_t> cmd_col, t_col;
    for (std::size_t i = 0; i < header.size(); ++i) {
        const auto name = trim(header[i]);
        if (name == "cmd") cmd_col = i;
        else if (name == "t") t_col = i;
    }
    if (!cmd_col) throw ParseError(rows.front().line, "header has no \"cmd\" column");

    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (row.fields.size() != header.size())
            throw ParseError(row.line, "expected " + std::to_string(header.size()) + " fields, got " +
                                           std::to_string(row.fields.size()));
        const auto command = trim(row.fields[*cmd_col]);
        if (command.empty()) throw ParseError(row.line, "empty \"cmd\" value");

        EventRecord rec;
        rec.command_type = command;
        if (t_col) {
            const auto ts = trim(row.fields[*t_col]);
            if (!ts.empty()) {
                const auto v = detail::parse_int64(ts);
                if (!v) throw ParseError(row.line, "\"t\" is not an integer: '" + ts + "'");
                rec.timestamp = *v;
            }
        }
        for (std::size_t i = 0; i < header.size(); ++i)
            if (i != *cmd_col && (!t_col || i != *t_col)) rec.payload.emplace(trim(header[i]), row.fields[i]);
        log.records.push_back(std::move(rec));
    }
    return log;
}

/// Warnings for timestamps that go backwards. Recorders glitch, so this is
/// never an error.
inline std::vector<std::string> lint_timestamps(const EventLog& log) {
    std::vector<std::string> out;
    std::optional<std::int64_t> last;
    for (std::size_t i = 0; i < log.records.size(); ++i) {
        const auto& ts = log.records[i].timestamp;
        if (!ts) continue;
        if (last && *ts < *last)
            out.push_back("log '" + log.id + "': record " + std::to_string(i + 1) + " timestamp " +
                          std::to_string(*ts) + " precedes " + std::to_string(*last));
        last = last ? std::max(*last, *ts) : *ts;
    }
    return out;
}

using LogParser = std::function<EventLog(std::string_view text, std::string log_id)>;

/// Format tag -> parser. Extend this table to accept additional recorders.
inline std::map<std::string, LogParser, std::less<>>& parser_registry() {
    static std::map<std::string, LogParser, std::less<>> registry{
        {"jsonl", [](std::string_view t, std::string id) { return parse_jsonl(t, std::move(id)); }},
        {"csv", [](std::string_view t, std::string id) { return parse_csv(t, std::move(id)); }},
    };
    return registry;
}

inline void validate_rename_map(const RenameMap& rename) {
    for (const auto& [from, to] : rename)
        if (trim(to).empty()) throw Error("rename target for '" + from + "' is empty");
}

/// Applies one renaming step per command (no chaining); counts of names
/// that collapse onto the same target are summed.
inline Corpus normalize(const Corpus& corpus, const RenameMap& rename) {
    validate_rename_map(rename);
    if (rename.empty()) return corpus;
    auto mapped = [&](const CommandType& c) -> const CommandType& {
        const auto it = rename.find(c);
        return it == rename.end() ? c : it->second;
    };
    std::vector<CommandHistogram> out;
    out.reserve(corpus.size());
    for (const auto& h : corpus) {
        CommandHistogram::Map counts;
        for (const auto& [c, n] : h.counts()) counts[mapped(c)] += n;
        out.emplace_back(h.log_id(), std::move(counts));
    }
    Corpus result(std::move(out));
    for (auto [id, log] : corpus.logs()) {
        for (auto& r : log.records) r.command_type = mapped(r.command_type);
        result = result.with_log(std::move(log));
    }
    return result;
}

struct FilterResult {
    Corpus corpus;
    std::vector<std::string> removed;
};

inline double median_total(const Corpus& corpus) {
    std::vector<Count> totals;
    totals.reserve(corpus.size());
    for (const auto& h : corpus) totals.push_back(h.total());
    std::sort(totals.begin(), totals.end());
    const auto n = totals.size();
    if (n == 0) return 0.0;
    return n % 2 ? static_cast<double>(totals[n / 2])
                 : 0.5 * (static_cast<double>(totals[n / 2 - 1]) + static_cast<double>(totals[n / 2]));
}

/// Drops logs whose total event count is strictly below
/// `min_fraction_of_median` times the median total.
inline FilterResult filter_short(const Corpus& corpus, double min_fraction_of_median) {
    if (!(min_fraction_of_median >= 0.0 && min_fraction_of_median <= 1.0))
        throw Error("filter fraction must lie in [0, 1]");
    if (corpus.empty()) return {corpus, {}};
    const double threshold = min_fraction_of_median * median_total(corpus);
    std::vector<CommandHistogram> kept;
    std::vector<std::string> removed;
    for (const auto& h : corpus) {
        if (static_cast<double>(h.total()) < threshold) removed.push_back(h.log_id());
        else kept.push_back(h);
    }
    Corpus result(std::move(kept));
    for (const auto& [id, log] : corpus.logs())
        if (result.contains(id)) result = result.with_log(log);
    return {std::move(result), std::move(removed)};
}

struct ManifestEntry {
    std::string log_id;
    std::filesystem::path path;
    std::string format;
};

struct CorpusManifest {
    std::vector<ManifestEntry> entries;
    RenameMap rename_map;
};

inline std::string format_from_extension(const std::filesystem::path& p) {
    const auto ext = p.extension().string();
    if (ext == ".jsonl" || ext == ".ndjson") return "jsonl";
    if (ext == ".csv") return "csv";
    return {};
}

/// Manifest JSON: {"logs":[{"id":..,"path":..,"format":"jsonl"|"csv"}],
/// "rename":{..}}. `id` defaults to the file stem and `format` to the
/// extension. Relative paths resolve against `base_dir`.
inline CorpusManifest parse_manifest(std::string_view text, const std::filesystem::path& base_dir = {}) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(std::string("manifest: malformed JSON: ") + e.what());
    }
    if (!j.is_object()) throw Error("manifest: expected an object");
    const auto logs = j.find("logs");
    if (logs == j.end() || !logs->is_array()) throw Error("manifest.logs: expected an array");

    CorpusManifest m;
    std::set<std::string> seen;
    for (std::size_t i = 0; i < logs->size(); ++i) {
        const auto& e = (*logs)[i];
        const auto where = "manifest.logs[" + std::to_string(i) + "]";
        if (!e.is_object()) throw Error(where + ": expected an object");
        if (!e.contains("path") || !e["path"].is_string()) throw Error(where + ".path: expected a string");

        ManifestEntry entry;
        entry.path = e["path"].get<std::string>();
        if (entry.path.is_relative() && !base_dir.empty()) entry.path = base_dir / entry.path;
        if (e.contains("id")) {
            if (!e["id"].is_string() || e["id"].get<std::string>().empty())
                throw Error(where + ".id: expected a non-empty string");
            entry.log_id = e["id"].get<std::string>();
        } else {
            entry.log_id = entry.path.stem().string();
        }
        if (e.contains("format")) {
            if (!e["format"].is_string()) throw Error(where + ".format: expected a string");
            entry.format = e["format"].get<std::string>();
        } else {
            entry.format = format_from_extension(entry.path);
        }
        if (!parser_registry().contains(entry.format))
            throw Error(where + ".format: unknown format '" + entry.format + "'");
        if (!seen.insert(entry.log_id).second) throw Error(where + ".id: duplicate log id '" + entry.log_id + "'");
        m.entries.push_back(std::move(entry));
    }
    if (const auto r = j.find("rename"); r != j.end()) {
        if (!r->is_object()) throw Error("manifest.rename: expected an object");
        for (const auto& [k, v] : r->items()) {
            if (!v.is_string() || trim(v.get<std::string>()).empty())
                throw Error("manifest.rename." + k + ": expected a non-empty string");
            m.rename_map.emplace(k, trim(v.get<std::string>()));
        }
    }
    return m;
}

inline CorpusManifest read_manifest(const std::filesystem::path& path) {
    return parse_manifest(detail::read_file(path), path.parent_path());
}

inline std::string manifest_to_json(const CorpusManifest& m) {
    nlohmann::ordered_json j;
    j["logs"] = nlohmann::ordered_json::array();
    for (const auto& e : m.entries)
        j["logs"].push_back({{"id", e.log_id}, {"path", e.path.generic_string()}, {"format", e.format}});
    if (!m.rename_map.empty()) {
        nlohmann::ordered_json r = nlohmann::ordered_json::object();
        for (const auto& [k, v] : m.rename_map) r[k] = v;
        j["rename"] = r;
    }
    return j.dump(2) + "\n";
}

struct LoadOptions {
    bool retain_logs = false;
    unsigned jobs = 1;
    std::vector<std::string>* warnings = nullptr;
};

/// Parses every manifest entry (in parallel when asked), applies the
/// rename map and assembles the corpus.
inline Corpus load_corpus(const CorpusManifest& manifest, const LoadOptions& opts = {}) {
    validate_rename_map(manifest.rename_map);
    std::set<std::string> ids;
    for (const auto& e : manifest.entries)
        if (!ids.insert(e.log_id).second) throw Error("duplicate log id '" + e.log_id + "' in manifest");

    std::vector<EventLog> logs(manifest.entries.size());
    std::vector<std::string> errors(manifest.entries.size());
    detail::parallel_for(manifest.entries.size(), opts.jobs, [&](std::size_t i) {
        const auto& e = manifest.entries[i];
        const auto ctx = "log '" + e.log_id + "' (" + e.path.string() + "): ";
        try {
            const auto parser = parser_registry().find(e.format);
            if (parser == parser_registry().end()) throw Error("unknown format '" + e.format + "'");
            if (!std::filesystem::exists(e.path)) throw Error("file does not exist");
            logs[i] = parser->second(detail::read_file(e.path), e.log_id);
        } catch (const std::exception& ex) {
            errors[i] = ctx + ex.what();
        }
    });
    for (const auto& err : errors)
        if (!err.empty()) throw Error(err);

    std::vector<CommandHistogram> hists;
    hists.reserve(logs.size());
    for (const auto& log : logs) {
        if (opts.warnings) {
            auto w = lint_timestamps(log);
            opts.warnings->insert(opts.warnings->end(), w.begin(), w.end());
        }
        hists.push_back(histogram(log));
    }
    Corpus corpus(std::move(hists));
    if (opts.retain_logs)
        for (auto& log : logs) corpus = corpus.with_log(std::move(log));
    return normalize(corpus, manifest.rename_map);
}

inline std::string to_jsonl(const EventLog& log) {
    std::string out;
    for (const auto& r : log.records) {
        nlohmann::ordered_json j;
        if (r.timestamp) j["t"] = *r.timestamp;
        j["cmd"] = r.command_type;
        if (!r.payload.empty()) {
            nlohmann::ordered_json args = nlohmann::ordered_json::object();
            for (const auto& [k, v] : r.payload) args[k] = v;
            j["args"] = args;
        }
        out += j.dump();
        out += '\n';
    }
    return out;
}

/// Expands counts into untimestamped records, commands in sorted order.
inline EventLog histogram_to_log(const CommandHistogram& h) {
    EventLog log{h.log_id(), {}};
    log.records.reserve(static_cast<std::size_t>(h.total()));
    for (const auto& [c, n] : h.counts())
        for (Count i = 0; i < n; ++i) log.records.push_back(EventRecord{std::nullopt, c, {}});
    return log;
}

/// Canonical JSON form of the histograms (used for determinism checks and
/// the `ingest --out` dump).
inline std::string corpus_to_json(const Corpus& corpus) {
    nlohmann::ordered_json j;
    j["logs"] = nlohmann::ordered_json::array();
    for (const auto& h : corpus) {
        nlohmann::ordered_json counts = nlohmann::ordered_json::object();
        for (const auto& [c, n] : h.counts()) counts[c] = n;
        j["logs"].push_back({{"id", h.log_id()}, {"total", h.total()}, {"counts", counts}});
    }
    return j.dump(2) + "\n";
}

inline Corpus corpus_from_json(std::string_view text) {
    const auto j = nlohmann::json::parse(text);
    std::vector<CommandHistogram> hists;
    for (const auto& e : j.at("logs")) {
        CommandHistogram::Map counts;
        for (const auto& [c, n] : e.at("counts").items()) counts.emplace(c, n.get<Count>());
        hists.emplace_back(e.at("id").get<std::string>(), std::move(counts));
    }
    return Corpus(std::move(hists));
}

}  // namespace logplag
