#include "eusboost/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "eusboost/errors.hpp"

namespace eusboost {

using json = nlohmann::json;

namespace {

std::string trim(std::string_view s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && (s[b] == ' ' || s[b] == '\t')) ++b;
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
    return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        out.push_back(trim(std::string_view(line).substr(start, comma - start)));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

bool is_blank(const std::string& line) { return trim(line).empty(); }

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::size_t> line_numbers;
};

CsvTable read_table(std::istream& in, const std::string& source) {
    CsvTable table;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (is_blank(line)) continue;
        auto fields = split_fields(line);
        if (table.header.empty()) {
            table.header = std::move(fields);
            continue;
        }
        if (fields.size() != table.header.size())
            throw DataError(source + ": line " + std::to_string(line_no) + " has " +
                                std::to_string(fields.size()) + " fields, header has " +
                                std::to_string(table.header.size()),
                            table.rows.size());
        table.rows.push_back(std::move(fields));
        table.line_numbers.push_back(line_no);
    }
    if (table.header.empty()) throw DataError(source + ": missing header row");
    return table;
}

double parse_cell(const std::string& cell, const CsvTable& table, std::size_t row, std::size_t col,
                  const std::string& source) {
    double value = 0.0;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    if (!cell.empty() && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (cell.empty() || ec != std::errc() || ptr != last || !std::isfinite(value))
        throw DataError(source + ": line " + std::to_string(table.line_numbers[row]) + " (row " +
                            std::to_string(row) + "), column '" + table.header[col] +
                            "': cannot parse '" + cell + "' as a finite number",
                        row, table.header[col]);
    return value;
}

std::size_t find_column(const CsvTable& table, const std::string& name) {
    for (std::size_t c = 0; c < table.header.size(); ++c)
        if (table.header[c] == name) return c;
    return table.header.size();
}

}  // namespace

Dataset parse_csv(std::istream& in, const std::string& label_column, const std::string& source) {
    const CsvTable table = read_table(in, source);
    const std::size_t label_col = find_column(table, label_column);
    if (label_col == table.header.size())
        throw DataError(source + ": no column named '" + label_column + "'");
    if (table.header.size() < 2) throw DataError(source + ": no feature columns");
    if (table.rows.empty()) throw DataError(source + ": no data rows");

    std::vector<std::vector<double>> rows;
    std::vector<std::string> labels;
    rows.reserve(table.rows.size());
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        std::vector<double> features;
        features.reserve(table.header.size() - 1);
        for (std::size_t c = 0; c < table.header.size(); ++c) {
            if (c == label_col) continue;
            features.push_back(parse_cell(table.rows[r][c], table, r, c, source));
        }
        rows.push_back(std::move(features));
        labels.push_back(table.rows[r][label_col]);
    }
    try {
        return make_dataset(rows, labels);
    } catch (const DataError& e) {
        throw DataError(source + ": " + e.what(), e.row(), e.column());
    }
}

Dataset load_csv(const std::filesystem::path& path, const std::string& label_column) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());
    return parse_csv(in, label_column, path.string());
}

RawTable load_raw_csv(const std::filesystem::path& path, const std::string& label_column) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());
    const std::string source = path.string();
    const CsvTable table = read_table(in, source);
    const std::size_t label_col = find_column(table, label_column);
    const bool labelled = label_col < table.header.size();
    RawTable out;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        std::vector<double> features;
        for (std::size_t c = 0; c < table.header.size(); ++c) {
            if (c == label_col) continue;
            features.push_back(parse_cell(table.rows[r][c], table, r, c, source));
        }
        out.rows.push_back(std::move(features));
        if (labelled) out.labels.push_back(table.rows[r][label_col]);
    }
    return out;
}

void write_csv(std::ostream& out, const Dataset& ds) {
    for (std::size_t j = 0; j < ds.dim(); ++j) out << "f" << (j + 1) << ",";
    out << "label\n";
    char buf[40];
    for (std::size_t i = 0; i < ds.size(); ++i) {
        for (double v : ds.row(i)) {
            std::snprintf(buf, sizeof buf, "%.17g", v);
            out << buf << ",";
        }
        out << ds.label_names().name_of(ds.label(i)) << "\n";
    }
}

void SyntheticSpec::validate() const {
    if (n < 4) throw std::invalid_argument("synthetic n must be at least 4");
    if (d < 1) throw std::invalid_argument("synthetic d must be at least 1");
    if (!(ir >= 1.0) || !std::isfinite(ir)) throw std::invalid_argument("imbalance ratio must be >= 1");
    if (!(delta >= 0.0) || !std::isfinite(delta)) throw std::invalid_argument("delta must be >= 0");
}

Dataset generate_synthetic(const SyntheticSpec& spec) {
    spec.validate();
    const auto n_neg = static_cast<std::size_t>(
        std::llround(static_cast<double>(spec.n) * spec.ir / (spec.ir + 1.0)));
    const std::size_t n_pos = spec.n - n_neg;
    if (n_pos < 2) throw std::invalid_argument("synthetic spec leaves fewer than 2 positives");

    RandomSource rng(spec.seed, "synthetic");
    std::vector<std::vector<double>> rows;
    std::vector<std::string> labels;
    rows.reserve(spec.n);
    for (std::size_t i = 0; i < spec.n; ++i) {
        const bool positive = i >= n_neg;
        std::vector<double> x(spec.d);
        for (double& v : x) v = rng.normal();
        if (positive) x[0] += spec.delta;
        rows.push_back(std::move(x));
        labels.emplace_back(positive ? kSyntheticPositiveLabel : kSyntheticNegativeLabel);
    }
    return make_dataset(rows, labels);
}

// ---------------------------------------------------------------------------
// Model documents

namespace {

constexpr const char* kFormatName = "eusboost-model";

json learner_to_json(const TrainedLearner& l) {
    json nodes = json::array();
    for (const auto& n : l.nodes()) {
        if (n.is_leaf())
            nodes.push_back({{"leaf", n.positive_confidence}});
        else
            nodes.push_back({{"feature", n.feature},
                             {"threshold", n.threshold},
                             {"left", n.left},
                             {"right", n.right}});
    }
    return {{"dim", l.dim()}, {"nodes", std::move(nodes)}};
}

json spec_to_json(const WeakLearnerSpec& s) {
    return {{"kind", s.kind == LearnerKind::Stump ? "stump" : "tree"},
            {"max_depth", s.max_depth},
            {"smoothing", s.smoothing}};
}

WeakLearnerSpec spec_from_json(const json& j) {
    WeakLearnerSpec s;
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "stump")
        s.kind = LearnerKind::Stump;
    else if (kind == "tree")
        s.kind = LearnerKind::Tree;
    else
        throw ModelFormatError("unknown learner kind '" + kind + "'");
    s.max_depth = j.at("max_depth").get<int>();
    s.smoothing = j.at("smoothing").get<double>();
    return s;
}

TrainedLearner learner_from_json(const json& j, const WeakLearnerSpec& spec) {
    std::vector<TrainedLearner::Node> nodes;
    for (const auto& n : j.at("nodes")) {
        TrainedLearner::Node node;
        if (n.contains("leaf")) {
            node.positive_confidence = n.at("leaf").get<double>();
        } else {
            node.feature = n.at("feature").get<int>();
            node.threshold = n.at("threshold").get<double>();
            node.left = n.at("left").get<int>();
            node.right = n.at("right").get<int>();
        }
        nodes.push_back(node);
    }
    return TrainedLearner(std::move(nodes), j.at("dim").get<std::size_t>(), spec);
}

json params_to_json(const MethodParams& p) {
    json eus = {{"population", p.eus.population},
                {"penalty", p.eus.penalty},
                {"diversity_weight", p.eus.diversity_weight},
                {"crossover_rate", p.eus.crossover_rate},
                {"max_evaluations", p.eus.max_evaluations},
                {"elitism", p.eus.elitism}};
    eus["mutation_rate"] = p.eus.mutation_rate ? json(*p.eus.mutation_rate) : json(nullptr);
    return {{"rounds", p.rounds},
            {"max_retries", p.max_retries},
            {"learner", spec_to_json(p.learner)},
            {"eus", std::move(eus)}};
}

MethodParams params_from_json(const json& j) {
    MethodParams p;
    p.rounds = j.at("rounds").get<std::size_t>();
    p.max_retries = j.at("max_retries").get<std::size_t>();
    p.learner = spec_from_json(j.at("learner"));
    const auto& e = j.at("eus");
    p.eus.population = e.at("population").get<std::size_t>();
    p.eus.penalty = e.at("penalty").get<double>();
    p.eus.diversity_weight = e.at("diversity_weight").get<double>();
    p.eus.crossover_rate = e.at("crossover_rate").get<double>();
    p.eus.max_evaluations = e.at("max_evaluations").get<std::size_t>();
    p.eus.elitism = e.at("elitism").get<std::size_t>();
    if (!e.at("mutation_rate").is_null()) p.eus.mutation_rate = e.at("mutation_rate").get<double>();
    return p;
}

json model_to_json(const Model& model) {
    if (const auto* boosted = std::get_if<BoostedEnsemble>(&model)) {
        json rounds = json::array();
        for (const auto& r : boosted->rounds)
            rounds.push_back({{"beta", r.beta}, {"learner", learner_to_json(r.learner)}});
        json telemetry = json::array();
        for (const auto& t : boosted->telemetry)
            telemetry.push_back({{"epsilon", t.epsilon},
                                 {"beta", t.beta},
                                 {"subset_size", t.subset_size},
                                 {"retries", t.retries}});
        return {{"kind", "boosted"}, {"rounds", std::move(rounds)}, {"telemetry", std::move(telemetry)}};
    }
    const auto& bagged = std::get<BaggedEnsemble>(model);
    json members = json::array();
    for (const auto& m : bagged.members)
        members.push_back({{"learner", learner_to_json(m.learner)}, {"sample_ids", m.sample_ids}});
    return {{"kind", "bagged"}, {"members", std::move(members)}};
}

Model model_from_json(const json& j, const WeakLearnerSpec& spec) {
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "boosted") {
        BoostedEnsemble m;
        for (const auto& r : j.at("rounds")) {
            const double b = r.at("beta").get<double>();
            if (!(b > 0.0 && b < 1.0)) throw ModelFormatError("round beta outside (0, 1)");
            m.rounds.push_back({learner_from_json(r.at("learner"), spec), b});
        }
        for (const auto& t : j.at("telemetry"))
            m.telemetry.push_back({t.at("epsilon").get<double>(), t.at("beta").get<double>(),
                                   t.at("subset_size").get<std::size_t>(),
                                   t.at("retries").get<std::size_t>()});
        if (m.rounds.empty()) throw ModelFormatError("boosted ensemble has no rounds");
        return m;
    }
    if (kind == "bagged") {
        BaggedEnsemble m;
        for (const auto& mem : j.at("members"))
            m.members.push_back({learner_from_json(mem.at("learner"), spec),
                                 mem.at("sample_ids").get<std::vector<std::size_t>>()});
        if (m.members.empty()) throw ModelFormatError("bagged ensemble has no members");
        return m;
    }
    throw ModelFormatError("unknown ensemble kind '" + kind + "'");
}

bool is_fingerprint(const std::string& s) {
    if (s.size() != 16) return false;
    for (char c : s)
        if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'))) return false;
    return true;
}

}  // namespace

std::string serialize_model(const ModelFile& file) {
    json doc = {{"format", kFormatName},
                {"version", ModelFile::kFormatVersion},
                {"method", std::string(method_tag(file.method))},
                {"hyperparameters", params_to_json(file.params)},
                {"training",
                 {{"dataset_fingerprint", file.dataset_fingerprint},
                  {"seed", file.seed},
                  {"dim", file.dim},
                  {"labels", {{"positive", file.labels.positive}, {"negative", file.labels.negative}}}}},
                {"ensemble", model_to_json(file.model)}};
    return doc.dump(1) + "\n";
}

ModelFile deserialize_model(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw ModelFormatError(std::string("model document is corrupted: ") + e.what());
    }
    try {
        if (!doc.is_object() || doc.value("format", "") != kFormatName)
            throw ModelFormatError("not an eusboost model document");
        const int version = doc.at("version").get<int>();
        if (version != ModelFile::kFormatVersion)
            throw UnsupportedVersionError("unsupported model format version " +
                                          std::to_string(version) + " (this build reads version " +
                                          std::to_string(ModelFile::kFormatVersion) + ")");
        ModelFile file;
        const auto method = parse_method(doc.at("method").get<std::string>());
        if (!method) throw ModelFormatError("unknown method tag");
        file.method = *method;
        file.params = params_from_json(doc.at("hyperparameters"));
        const auto& training = doc.at("training");
        file.dataset_fingerprint = training.at("dataset_fingerprint").get<std::string>();
        if (!is_fingerprint(file.dataset_fingerprint))
            throw ModelFormatError("dataset fingerprint must be 16 lowercase hex digits");
        file.seed = training.at("seed").get<std::uint64_t>();
        file.dim = training.at("dim").get<std::size_t>();
        file.labels.positive = training.at("labels").at("positive").get<std::string>();
        file.labels.negative = training.at("labels").at("negative").get<std::string>();
        file.model = model_from_json(doc.at("ensemble"), file.params.learner);
        return file;
    } catch (const ModelFormatError&) {
        throw;
    } catch (const std::exception& e) {
        throw ModelFormatError(std::string("model document is invalid: ") + e.what());
    }
}

void save_model(const ModelFile& file, const std::filesystem::path& path) {
    const std::string text = serialize_model(file);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

ModelFile load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ModelFormatError("cannot open model file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return deserialize_model(buf.str());
}

}  // namespace eusboost
