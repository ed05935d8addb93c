#include "covertflow/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "covertflow/errors.hpp"

namespace covertflow::io {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw MissingFile(path);
    return in;
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write file: " + path);
    return out;
}

} // namespace

Config Config::load(const std::string& path) {
    auto in = open_input(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_text(ss.str());
}

Config Config::parse_text(const std::string& text) {
    Config cfg;
    std::istringstream in(text);
    std::string line, section;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = trim(line);
        if (line.empty() || line[0] == '#' || line[0] == ';') continue;
        if (line.front() == '[' && line.back() == ']') {
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ValidationError("config line " + std::to_string(line_no) +
                                  ": expected key = value");
        cfg.sections_[section][trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return cfg;
}

bool Config::has(const std::string& section, const std::string& key) const {
    auto s = sections_.find(section);
    return s != sections_.end() && s->second.count(key) > 0;
}

std::string Config::get_str(const std::string& section, const std::string& key,
                            const std::string& fallback) const {
    auto s = sections_.find(section);
    if (s == sections_.end()) return fallback;
    auto k = s->second.find(key);
    return k == s->second.end() ? fallback : k->second;
}

double Config::get_num(const std::string& section, const std::string& key, double fallback) const {
    if (!has(section, key)) return fallback;
    const std::string v = get_str(section, key, "");
    try {
        size_t used = 0;
        const double x = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ValidationError("config [" + section + "] " + key + ": not a number: " + v);
    }
}

long Config::get_int(const std::string& section, const std::string& key, long fallback) const {
    if (!has(section, key)) return fallback;
    const std::string v = get_str(section, key, "");
    try {
        size_t used = 0;
        const long x = std::stol(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ValidationError("config [" + section + "] " + key + ": not an integer: " + v);
    }
}

bool Config::get_bool(const std::string& section, const std::string& key, bool fallback) const {
    if (!has(section, key)) return fallback;
    const std::string v = get_str(section, key, "");
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ValidationError("config [" + section + "] " + key + ": not a boolean: " + v);
}

std::string format_decimal(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

double parse_decimal(const std::string& s) {
    try {
        return std::stod(s);
    } catch (const std::exception&) {
        throw ValidationError("not a decimal value: " + s);
    }
}

namespace {

using json = nlohmann::ordered_json;

json incident_to_json(const IncidentRecord& rec) {
    json j = rec.extra.is_object() ? rec.extra : json::object();
    const Incident& inc = rec.incident;
    j["id"] = inc.id;
    j["chain"] = to_string(inc.chain);
    j["mev_type"] = to_string(inc.mev_type);
    j["block"] = inc.block;
    j["extractor"] = inc.extractor;
    j["extractee"] = inc.extractee;
    j["profit_usd"] = format_decimal(inc.profit_usd);
    j["capital_usd"] = format_decimal(inc.capital_usd);
    j["loss_usd"] = format_decimal(inc.loss_usd);
    return j;
}

double json_usd(const json& j, const char* key) {
    if (!j.contains(key)) throw ValidationError(std::string("incident missing field: ") + key);
    if (j[key].is_string()) return parse_decimal(j[key].get<std::string>());
    return j[key].get<double>();
}

IncidentRecord incident_from_json(const json& j) {
    IncidentRecord rec;
    rec.incident.id = j.at("id").get<std::string>();
    rec.incident.chain = chain_from_string(j.at("chain").get<std::string>());
    rec.incident.mev_type = mev_type_from_string(j.at("mev_type").get<std::string>());
    rec.incident.block = j.value("block", 0L);
    rec.incident.extractor = j.at("extractor").get<std::string>();
    rec.incident.extractee = j.at("extractee").get<std::string>();
    rec.incident.profit_usd = json_usd(j, "profit_usd");
    rec.incident.capital_usd = json_usd(j, "capital_usd");
    rec.incident.loss_usd = json_usd(j, "loss_usd");
    rec.extra = json::object();
    static const char* known[] = {"id",        "chain",      "mev_type",   "block", "extractor",
                                  "extractee", "profit_usd", "capital_usd", "loss_usd"};
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool is_known = false;
        for (const char* k : known) is_known = is_known || it.key() == k;
        if (!is_known) rec.extra[it.key()] = it.value();
    }
    return rec;
}

} // namespace

std::vector<IncidentRecord> read_incidents_jsonl(const std::string& path) {
    auto in = open_input(path);
    std::vector<IncidentRecord> out;
    std::string line;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        out.push_back(incident_from_json(json::parse(line)));
    }
    return out;
}

void write_incidents_jsonl(const std::string& path, const std::vector<IncidentRecord>& records) {
    auto out = open_output(path);
    for (const auto& rec : records) out << incident_to_json(rec).dump() << "\n";
}

std::vector<LedgerTx> read_ledger_jsonl(const std::string& path) {
    auto in = open_input(path);
    std::vector<LedgerTx> out;
    std::string line;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        const json j = json::parse(line);
        LedgerTx tx;
        tx.id = j.at("tx").get<std::string>();
        tx.block = j.at("block").get<long>();
        tx.position = j.at("pos").get<int>();
        tx.from = j.at("from").get<std::string>();
        tx.to = j.value("to", std::string{});
        tx.transfer_amount = j.value("transfer", 0.0);
        if (j.contains("swaps")) {
            for (const auto& s : j["swaps"]) {
                DecodedSwap ds;
                ds.pool_id = s.at("pool").get<std::string>();
                ds.direction = s.at("dir").get<std::string>() == "base_for_quote"
                                   ? amm::Direction::BaseForQuote
                                   : amm::Direction::QuoteForBase;
                ds.amount_in = s.at("in").get<double>();
                ds.amount_out = s.at("out").get<double>();
                tx.swaps.push_back(std::move(ds));
            }
        }
        out.push_back(std::move(tx));
    }
    return out;
}

void write_ledger_jsonl(const std::string& path, const std::vector<LedgerTx>& ledger) {
    auto out = open_output(path);
    for (const auto& tx : ledger) {
        json j;
        j["tx"] = tx.id;
        j["block"] = tx.block;
        j["pos"] = tx.position;
        j["from"] = tx.from;
        if (!tx.to.empty()) j["to"] = tx.to;
        if (!tx.swaps.empty()) {
            json swaps = json::array();
            for (const auto& s : tx.swaps) {
                json sj;
                sj["pool"] = s.pool_id;
                sj["dir"] = s.direction == amm::Direction::BaseForQuote ? "base_for_quote"
                                                                        : "quote_for_base";
                sj["in"] = s.amount_in;
                sj["out"] = s.amount_out;
                swaps.push_back(std::move(sj));
            }
            j["swaps"] = std::move(swaps);
        }
        if (tx.transfer_amount != 0.0) j["transfer"] = tx.transfer_amount;
        out << j.dump() << "\n";
    }
}

void write_features_jsonl(const std::string& path, const std::vector<std::string>& ids,
                          const std::vector<FeatureVector>& features) {
    if (ids.size() != features.size()) throw LengthMismatch();
    auto out = open_output(path);
    for (size_t i = 0; i < ids.size(); ++i) {
        json j;
        j["id"] = ids[i];
        j["f1"] = features[i].f1_volume_usd;
        j["f2"] = features[i].f2_ratio;
        j["f3"] = features[i].f3_bilateral_freq;
        j["f4"] = features[i].f4_extractee_freq;
        out << j.dump() << "\n";
    }
}

std::pair<std::vector<std::string>, std::vector<FeatureVector>> read_features_jsonl(
    const std::string& path) {
    auto in = open_input(path);
    std::vector<std::string> ids;
    std::vector<FeatureVector> features;
    std::string line;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        const json j = json::parse(line);
        ids.push_back(j.at("id").get<std::string>());
        FeatureVector f;
        f.f1_volume_usd = j.at("f1").get<double>();
        f.f2_ratio = j.at("f2").get<double>();
        f.f3_bilateral_freq = j.at("f3").get<long>();
        f.f4_extractee_freq = j.at("f4").get<long>();
        features.push_back(f);
    }
    return {std::move(ids), std::move(features)};
}

void write_model_json(const std::string& path, const copula::CopulaModel& model,
                      const nlohmann::ordered_json& extras) {
    json j;
    j["family"] = copula::to_string(model.family);
    j["dim"] = model.dim;
    json rows = json::array();
    for (int i = 0; i < model.dim; ++i) {
        json row = json::array();
        for (int k = 0; k < model.dim; ++k)
            row.push_back(model.R[static_cast<size_t>(i) * model.dim + k]);
        rows.push_back(std::move(row));
    }
    j["R"] = std::move(rows);
    if (model.family == copula::Family::StudentT) j["nu"] = model.nu;
    j["loglik"] = model.loglik;
    j["aic"] = model.aic;
    j["bic"] = model.bic;
    j["n"] = model.n;
    j["jitter_seed"] = model.jitter_seed;
    j["jitter_eps"] = model.jitter_eps;
    if (!extras.is_null() && !extras.empty())
        for (auto it = extras.begin(); it != extras.end(); ++it) j[it.key()] = it.value();
    auto out = open_output(path);
    out << j.dump(2) << "\n";
}

copula::CopulaModel read_model_json(const std::string& path) {
    auto in = open_input(path);
    const json j = json::parse(in);
    copula::CopulaModel model;
    model.family = copula::family_from_string(j.at("family").get<std::string>());
    model.dim = j.at("dim").get<int>();
    model.R.assign(static_cast<size_t>(model.dim) * model.dim, 0.0);
    for (int i = 0; i < model.dim; ++i)
        for (int k = 0; k < model.dim; ++k)
            model.R[static_cast<size_t>(i) * model.dim + k] = j.at("R")[static_cast<size_t>(i)][static_cast<size_t>(k)].get<double>();
    model.nu = j.value("nu", 0);
    model.loglik = j.value("loglik", 0.0);
    model.aic = j.value("aic", 0.0);
    model.bic = j.value("bic", 0.0);
    model.n = j.value("n", static_cast<std::size_t>(0));
    model.jitter_seed = j.value("jitter_seed", static_cast<std::uint64_t>(0));
    model.jitter_eps = j.value("jitter_eps", 0.4);
    return model;
}

void write_tail_fit_json(const std::string& path, const tail_stats::TailFit& fit,
                         const std::string& feature) {
    json j;
    j["feature"] = feature;
    j["x_min"] = fit.x_min;
    j["alpha"] = fit.alpha;
    j["n_tail"] = fit.n_tail;
    j["ks_stat"] = fit.ks_stat;
    auto out = open_output(path);
    out << j.dump(2) << "\n";
}

void write_ranked_jsonl(const std::string& path, const std::vector<RankedRecord>& records) {
    auto out = open_output(path);
    for (const auto& rec : records) {
        json j;
        j["id"] = rec.score.incident_id;
        j["p"] = rec.score.p;
        j["mc_std_err"] = rec.score.mc_std_err;
        j["rank"] = rec.score.rank;
        j["f"] = {rec.features.f1_volume_usd, rec.features.f2_ratio,
                  rec.features.f3_bilateral_freq, rec.features.f4_extractee_freq};
        j["pct"] = {rec.percentiles[0], rec.percentiles[1], rec.percentiles[2],
                    rec.percentiles[3]};
        out << j.dump() << "\n";
    }
}

std::vector<RankedRecord> read_ranked_jsonl(const std::string& path) {
    auto in = open_input(path);
    std::vector<RankedRecord> out;
    std::string line;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        const json j = json::parse(line);
        RankedRecord rec;
        rec.score.incident_id = j.at("id").get<std::string>();
        rec.score.p = j.at("p").get<double>();
        rec.score.mc_std_err = j.at("mc_std_err").get<double>();
        rec.score.rank = j.at("rank").get<long>();
        rec.features.f1_volume_usd = j.at("f")[0].get<double>();
        rec.features.f2_ratio = j.at("f")[1].get<double>();
        rec.features.f3_bilateral_freq = j.at("f")[2].get<long>();
        rec.features.f4_extractee_freq = j.at("f")[3].get<long>();
        for (int k = 0; k < 4; ++k) rec.percentiles[static_cast<size_t>(k)] = j.at("pct")[static_cast<size_t>(k)].get<double>();
        out.push_back(std::move(rec));
    }
    return out;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
    auto out = open_output(path);
    for (size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
    out << "\n";
    for (const auto& row : rows) {
        for (size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
        out << "\n";
    }
}

} // namespace covertflow::io
