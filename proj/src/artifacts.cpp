#include "etchforge/artifacts.hpp"

#include <algorithm>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <tuple>

#include "etchforge/errors.hpp"

namespace etchforge {
namespace {

using nlohmann::json;

std::string read_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw MissingFile(path.string());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::string num(double x) {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

}  // namespace

std::string hash_file(const std::filesystem::path& path) {
    const std::string bytes = read_bytes(path);
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    std::ostringstream os;
    os << "fnv1a:" << std::hex << h;
    return os.str();
}

void write_labeled_dataset(const LabeledDataset& dataset, const EventLog& log,
                           const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);

    {
        std::ofstream out(dir / "segments.jsonl", std::ios::trunc);
        if (!out) throw Error("cannot write " + (dir / "segments.jsonl").string());
        for (const auto& s : dataset.segments) {
            json j{{"segment", s.segment_id},
                   {"chamber", s.chamber_id},
                   {"start", s.start},
                   {"censored", s.censored},
                   {"productive_hours", s.total_productive_hours}};
            j["breakdown"] = s.breakdown_time.has_value() ? json(*s.breakdown_time) : json(nullptr);
            out << j.dump() << '\n';
        }
    }
    {
        std::ofstream out(dir / "labeled.jsonl", std::ios::trunc);
        if (!out) throw Error("cannot write " + (dir / "labeled.jsonl").string());
        for (const auto& lr : dataset.labeled) {
            json j{{"run", log.runs.at(lr.run_index).run_id},
                   {"chamber", log.runs.at(lr.run_index).chamber_id},
                   {"segment", lr.segment_id},
                   {"censored", lr.censored}};
            if (lr.censored) {
                j["ttf"] = nullptr;
                j["health"] = nullptr;
            } else {
                j["ttf"] = lr.ttf;
                j["health"] = lr.health;
                json intervals = json::object();
                for (const auto& [bound, value] : lr.interval_labels) intervals[num(bound)] = value;
                j["intervals"] = intervals;
            }
            out << j.dump() << '\n';
        }
    }
}

LabeledDataset read_labeled_dataset(const EventLog& log, const std::filesystem::path& dir) {
    LabeledDataset dataset;

    std::map<std::string, std::size_t> run_index;
    for (std::size_t i = 0; i < log.runs.size(); ++i) run_index[log.runs[i].run_id] = i;

    std::map<std::string, std::size_t> segment_index;
    {
        std::ifstream in(dir / "segments.jsonl");
        if (!in) throw MissingFile((dir / "segments.jsonl").string());
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
            json j;
            try {
                j = json::parse(line);
                Segment s;
                s.segment_id = j.at("segment").get<std::string>();
                s.chamber_id = j.at("chamber").get<std::string>();
                s.start = j.at("start").get<double>();
                s.censored = j.at("censored").get<bool>();
                s.total_productive_hours = j.at("productive_hours").get<double>();
                if (!j.at("breakdown").is_null()) s.breakdown_time = j.at("breakdown").get<double>();
                segment_index[s.segment_id] = dataset.segments.size();
                dataset.segments.push_back(std::move(s));
            } catch (const json::exception& e) {
                throw MalformedRecord("segments.jsonl", lineno, e.what());
            }
        }
    }
    {
        std::ifstream in(dir / "labeled.jsonl");
        if (!in) throw MissingFile((dir / "labeled.jsonl").string());
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
            try {
                const json j = json::parse(line);
                LabeledRun lr;
                const std::string run_id = j.at("run").get<std::string>();
                const auto run_it = run_index.find(run_id);
                if (run_it == run_index.end()) {
                    throw MalformedRecord("labeled.jsonl", lineno, "unknown run id " + run_id);
                }
                lr.run_index = run_it->second;
                lr.segment_id = j.at("segment").get<std::string>();
                const auto seg_it = segment_index.find(lr.segment_id);
                if (seg_it == segment_index.end()) {
                    throw MalformedRecord("labeled.jsonl", lineno, "unknown segment id " + lr.segment_id);
                }
                lr.segment_index = seg_it->second;
                lr.censored = j.at("censored").get<bool>();
                if (!lr.censored) {
                    lr.ttf = j.at("ttf").get<double>();
                    lr.health = j.at("health").get<double>();
                    for (const auto& [key, value] : j.at("intervals").items()) {
                        lr.interval_labels[std::stod(key)] = value.get<bool>();
                    }
                }
                dataset.segments.at(lr.segment_index).run_indices.push_back(lr.run_index);
                dataset.labeled.push_back(std::move(lr));
            } catch (const Error&) {
                throw;
            } catch (const std::exception& e) {
                throw MalformedRecord("labeled.jsonl", lineno, e.what());
            }
        }
    }
    if (dataset.labeled.empty()) throw EmptyResult("labeled.jsonl holds no rows");
    return dataset;
}

void write_feature_csv(const FeatureMatrix& matrix, const EventLog& log, const LabeledDataset& dataset,
                       const std::vector<std::size_t>& rows, const std::filesystem::path& path) {
    if (static_cast<std::size_t>(matrix.values.rows()) != rows.size()) {
        throw InvalidConfig("feature matrix rows do not match row ids");
    }
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    out << "run_id";
    for (const auto& name : matrix.names) out << ',' << name;
    out << '\n';
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out << log.runs.at(dataset.labeled.at(rows[i]).run_index).run_id;
        for (Eigen::Index j = 0; j < matrix.values.cols(); ++j) {
            out << ',' << num(matrix.values(static_cast<Eigen::Index>(i), j));
        }
        out << '\n';
    }
}

void write_feature_provenance(const FeatureMatrix& matrix, const std::filesystem::path& path) {
    json provenance = json::object();
    for (std::size_t j = 0; j < matrix.names.size(); ++j) {
        provenance[matrix.names[j]] = to_string(matrix.provenance[j]);
    }
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    out << provenance.dump(2) << '\n';
}

std::string penalties_csv(const PenaltyTable& alarms, const PenaltyTable& violations) {
    struct Row {
        std::string source;
        std::string code;
        int occurrences;
        double median;
        double penalty;
    };
    std::vector<Row> rows;
    auto collect = [&](const PenaltyTable& t, const char* source) {
        for (const auto& [code, med] : t.median_ttf) {
            rows.push_back({source, code, t.occurrences.at(code), med, t.penalty.at(code)});
        }
    };
    collect(violations, "violation");
    collect(alarms, "alarm");
    std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
        return std::tie(a.median, a.source, a.code) < std::tie(b.median, b.source, b.code);
    });

    std::ostringstream os;
    os << "source,code,occurrences,median_ttf_hours,penalty\n";
    for (const auto& r : rows) {
        os << r.source << ',' << r.code << ',' << r.occurrences << ',' << num(r.median) << ','
           << num(r.penalty) << '\n';
    }
    return os.str();
}

}  // namespace etchforge
