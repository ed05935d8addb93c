#pragma once
#include <array>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "covertflow/copula.hpp"
#include "covertflow/incident.hpp"
#include "covertflow/ledger.hpp"
#include "covertflow/tail_stats.hpp"

// File formats: sectioned key=value config, JSONL for incidents/ledgers/
// rankings, CSV for tabular plot data. USD amounts are serialized as decimal
// strings so a write-read cycle is drift-free.
namespace covertflow::io {

class Config {
public:
    static Config load(const std::string& path);
    static Config parse_text(const std::string& text);

    bool has(const std::string& section, const std::string& key) const;
    std::string get_str(const std::string& section, const std::string& key,
                        const std::string& fallback) const;
    double get_num(const std::string& section, const std::string& key, double fallback) const;
    long get_int(const std::string& section, const std::string& key, long fallback) const;
    bool get_bool(const std::string& section, const std::string& key, bool fallback) const;

private:
    std::map<std::string, std::map<std::string, std::string>> sections_;
};

// shortest decimal string that parses back to the same double
std::string format_decimal(double v);
double parse_decimal(const std::string& s);

struct IncidentRecord {
    Incident incident;
    nlohmann::ordered_json extra; // unknown fields, preserved on round trip
};

std::vector<IncidentRecord> read_incidents_jsonl(const std::string& path);
void write_incidents_jsonl(const std::string& path, const std::vector<IncidentRecord>& records);

std::vector<LedgerTx> read_ledger_jsonl(const std::string& path);
void write_ledger_jsonl(const std::string& path, const std::vector<LedgerTx>& ledger);

void write_features_jsonl(const std::string& path, const std::vector<std::string>& ids,
                          const std::vector<FeatureVector>& features);
std::pair<std::vector<std::string>, std::vector<FeatureVector>> read_features_jsonl(
    const std::string& path);

void write_model_json(const std::string& path, const copula::CopulaModel& model,
                      const nlohmann::ordered_json& extras = {});
copula::CopulaModel read_model_json(const std::string& path);

void write_tail_fit_json(const std::string& path, const tail_stats::TailFit& fit,
                         const std::string& feature);

struct RankedRecord {
    copula::TriageScore score;
    FeatureVector features;
    std::array<double, 4> percentiles{};
};

void write_ranked_jsonl(const std::string& path, const std::vector<RankedRecord>& records);
std::vector<RankedRecord> read_ranked_jsonl(const std::string& path);

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

} // namespace covertflow::io
