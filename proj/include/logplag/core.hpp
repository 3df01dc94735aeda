#pragma once
// Domain types shared by every detector: event records, submission logs,
// per-log command histograms and the corpus they form.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace logplag {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using CommandType = std::string;
using Count = std::int64_t;

inline std::string trim(std::string_view s) {
    constexpr std::string_view ws = " \t\r\n\f\v";
    const auto first = s.find_first_not_of(ws);
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(ws);
    return std::string(s.substr(first, last - first + 1));
}

/// One logged command occurrence. Timestamp and payload ride along for
/// inspection but never enter the detection math.
struct EventRecord {
    std::optional<std::int64_t> timestamp;  // ms since epoch
    CommandType command_type;
    std::map<std::string, std::string> payload;

    friend bool operator==(const EventRecord&, const EventRecord&) = default;
};

/// Builds a record with a trimmed, non-empty command token.
inline EventRecord make_record(std::string_view command,
                               std::optional<std::int64_t> timestamp = std::nullopt,
                               std::map<std::string, std::string> payload = {}) {
    auto cmd = trim(command);
    if (cmd.empty()) throw Error("event record has an empty command type");
    return EventRecord{timestamp, std::move(cmd), std::move(payload)};
}

struct EventLog {
    std::string id;
    std::vector<EventRecord> records;

    friend bool operator==(const EventLog&, const EventLog&) = default;
};

/// Per-log counts N(L,c). Absent commands have count zero and are never
/// stored, so every stored count is at least one.
class CommandHistogram {
public:
    using Map = std::map<CommandType, Count>;

    CommandHistogram() = default;
    explicit CommandHistogram(std::string log_id) : log_id_(std::move(log_id)) {}

    /// Zero entries are dropped; negative counts and empty command names throw.
    CommandHistogram(std::string log_id, Map counts) : log_id_(std::move(log_id)) {
        for (auto& [cmd, n] : counts) {
            if (n < 0) throw Error("negative count for command '" + cmd + "' in log '" + log_id_ + "'");
            if (cmd.empty()) throw Error("empty command type in log '" + log_id_ + "'");
            if (n == 0) continue;
            total_ += n;
            counts_.emplace_hint(counts_.end(), cmd, n);
        }
    }

    const std::string& log_id() const noexcept { return log_id_; }
    const Map& counts() const noexcept { return counts_; }

    Count count(const CommandType& cmd) const {
        const auto it = counts_.find(cmd);
        return it == counts_.end() ? 0 : it->second;
    }
    bool contains(const CommandType& cmd) const { return counts_.contains(cmd); }

    /// T(L) in lexicographic order.
    std::vector<CommandType> types() const {
        std::vector<CommandType> out;
        out.reserve(counts_.size());
        for (const auto& kv : counts_) out.push_back(kv.first);
        return out;
    }

    std::size_t num_types() const noexcept { return counts_.size(); }
    Count total() const noexcept { return total_; }
    bool empty() const noexcept { return counts_.empty(); }

    CommandHistogram with_id(std::string id) const {
        CommandHistogram h = *this;
        h.log_id_ = std::move(id);
        return h;
    }

    friend bool operator==(const CommandHistogram& a, const CommandHistogram& b) {
        return a.log_id_ == b.log_id_ && a.counts_ == b.counts_;
    }

private:
    std::string log_id_;
    Map counts_;
    Count total_ = 0;
};

/// Counts every record of the log by its command type.
inline CommandHistogram histogram(const EventLog& log) {
    CommandHistogram::Map counts;
    for (const auto& r : log.records) ++counts[r.command_type];
    return CommandHistogram(log.id, std::move(counts));
}

/// L_U: the subsequence of records whose command type lies in `types`.
inline EventLog restrict(const EventLog& log, const std::set<CommandType>& types) {
    EventLog out;
    out.id = log.id + "|restrict{";
    bool first = true;
    for (const auto& t : types) {
        if (!first) out.id += ',';
        out.id += t;
        first = false;
    }
    out.id += '}';
    for (const auto& r : log.records)
        if (types.contains(r.command_type)) out.records.push_back(r);
    return out;
}

/// The set of logs under analysis, kept sorted by log id so that every
/// derived quantity is independent of insertion order.
class Corpus {
public:
    Corpus() = default;

    explicit Corpus(std::vector<CommandHistogram> histograms) : histograms_(std::move(histograms)) {
        std::sort(histograms_.begin(), histograms_.end(),
                  [](const auto& a, const auto& b) { return a.log_id() < b.log_id(); });
        for (std::size_t i = 0; i < histograms_.size(); ++i) {
            if (histograms_[i].log_id().empty()) throw Error("log id must not be empty");
            if (i > 0 && histograms_[i - 1].log_id() == histograms_[i].log_id())
                throw Error("duplicate log id '" + histograms_[i].log_id() + "'");
        }
    }

    /// Returns a new corpus with `h` added; throws on a duplicate id.
    Corpus with(CommandHistogram h) const {
        auto all = histograms_;
        all.push_back(std::move(h));
        Corpus c(std::move(all));
        c.logs_ = logs_;
        return c;
    }

    Corpus with_log(EventLog log) const {
        Corpus c = *this;
        c.logs_.insert_or_assign(log.id, std::move(log));
        return c;
    }

    std::size_t size() const noexcept { return histograms_.size(); }
    bool empty() const noexcept { return histograms_.empty(); }

    const std::vector<CommandHistogram>& histograms() const noexcept { return histograms_; }
    auto begin() const noexcept { return histograms_.begin(); }
    auto end() const noexcept { return histograms_.end(); }
    const CommandHistogram& operator[](std::size_t i) const { return histograms_[i]; }

    std::optional<std::size_t> index_of(std::string_view id) const {
        const auto it = std::lower_bound(histograms_.begin(), histograms_.end(), id,
                                         [](const auto& h, std::string_view v) { return h.log_id() < v; });
        if (it == histograms_.end() || it->log_id() != id) return std::nullopt;
        return static_cast<std::size_t>(it - histograms_.begin());
    }
    bool contains(std::string_view id) const { return index_of(id).has_value(); }

    const CommandHistogram& at(std::string_view id) const {
        const auto i = index_of(id);
        if (!i) throw Error("unknown log id '" + std::string(id) + "'");
        return histograms_[*i];
    }

    /// T, the union of all T(L), sorted.
    std::vector<CommandType> universe() const {
        std::set<CommandType> all;
        for (const auto& h : histograms_)
            for (const auto& kv : h.counts()) all.insert(kv.first);
        return {all.begin(), all.end()};
    }

    std::vector<std::string> ids() const {
        std::vector<std::string> out;
        out.reserve(histograms_.size());
        for (const auto& h : histograms_) out.push_back(h.log_id());
        return out;
    }

    /// Raw event logs, when ingestion was asked to keep them.
    const std::map<std::string, EventLog>& logs() const noexcept { return logs_; }

private:
    std::vector<CommandHistogram> histograms_;
    std::map<std::string, EventLog> logs_;
};

}  // namespace logplag
