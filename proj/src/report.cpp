#include "genmotif/report.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace genmotif {

using nlohmann::json;

namespace {

json segment_rows(const Segment& seg) {
    json rows = json::array();
    for (std::size_t t = 0; t < seg.length(); ++t) {
        json row = json::array();
        for (std::size_t k = 0; k < seg.dims(); ++k) row.push_back(seg(t, k));
        rows.push_back(std::move(row));
    }
    return rows;
}

Segment segment_from_rows(const json& rows, Interval origin) {
    std::vector<double> values;
    std::size_t dims = 0;
    for (const auto& row : rows) {
        if (dims == 0) dims = row.size();
        if (row.size() != dims) throw std::runtime_error("report: ragged segment rows");
        for (const auto& v : row) values.push_back(v.get<double>());
    }
    return Segment(std::move(values), dims, origin);
}

// JSON has no infinity; the worst fitness is stored as null.
json number_or_null(double v) {
    return std::isfinite(v) ? json(v) : json(nullptr);
}

double number_or_inf(const json& v) {
    return v.is_null() ? kWorstFitness : v.get<double>();
}

json to_json(const MotifReport& report) {
    const RunInfo& r = report.run;
    json run = {
        {"fitness", number_or_null(r.fitness)},
        {"index", r.index},
        {"representative", r.representative},
        {"dissimilarity", r.dissimilarity},
        {"znorm", r.znorm},
        {"overlap_tolerance", r.overlap_tolerance},
        {"elapsed_ms", r.elapsed_ms},
        {"generations", r.generations},
        {"evaluations", r.evaluations},
        {"cancelled", r.cancelled},
        {"seed", r.seed},
        {"population_size", r.population_size},
        {"sigma", r.sigma},
        {"threads", r.threads},
        {"tournament_selection", r.tournament_selection},
        {"time_limit_ms", r.time_limit_ms ? json(*r.time_limit_ms) : json(nullptr)},
        {"generation_limit", r.generation_limit ? json(*r.generation_limit) : json(nullptr)},
        {"k", r.k},
        {"support", r.support},
        {"min_length", r.min_length},
        {"max_length", r.max_length},
        {"input", r.input},
        {"series_length", r.series_length},
        {"dims", r.dims},
    };

    json motifs = json::array();
    for (const auto& m : report.motifs) {
        json supports = json::array();
        for (const auto& s : m.supports) {
            supports.push_back({{"start", s.gene.start},
                                {"length", s.gene.length},
                                {"indicator", s.gene.indicator},
                                {"original", segment_rows(s.original)},
                                {"prepared", segment_rows(s.prepared)}});
        }
        motifs.push_back({{"index", m.index},
                          {"spread", number_or_null(m.spread)},
                          {"representative", segment_rows(m.representative)},
                          {"supports", std::move(supports)}});
    }
    return {{"format_version", report.format_version}, {"run", std::move(run)}, {"motifs", std::move(motifs)}};
}

MotifReport from_json(const json& doc) {
    MotifReport report;
    report.format_version = doc.at("format_version").get<int>();
    if (report.format_version != kReportFormatVersion)
        throw std::runtime_error("unsupported report format version " + std::to_string(report.format_version));

    const json& run = doc.at("run");
    RunInfo& r = report.run;
    r.fitness = number_or_inf(run.at("fitness"));
    r.index = run.at("index").get<std::string>();
    r.representative = run.at("representative").get<std::string>();
    r.dissimilarity = run.at("dissimilarity").get<std::string>();
    r.znorm = run.at("znorm").get<bool>();
    r.overlap_tolerance = run.at("overlap_tolerance").get<double>();
    r.elapsed_ms = run.at("elapsed_ms").get<double>();
    r.generations = run.at("generations").get<std::size_t>();
    r.evaluations = run.at("evaluations").get<std::size_t>();
    r.cancelled = run.value("cancelled", false);
    r.seed = run.at("seed").get<std::uint64_t>();
    r.population_size = run.at("population_size").get<std::size_t>();
    r.sigma = run.at("sigma").get<double>();
    r.threads = run.value("threads", std::size_t{1});
    r.tournament_selection = run.value("tournament_selection", false);
    if (run.contains("time_limit_ms") && !run["time_limit_ms"].is_null())
        r.time_limit_ms = run["time_limit_ms"].get<double>();
    if (run.contains("generation_limit") && !run["generation_limit"].is_null())
        r.generation_limit = run["generation_limit"].get<std::size_t>();
    r.k = run.at("k").get<std::size_t>();
    r.support = run.at("support").get<std::size_t>();
    r.min_length = run.at("min_length").get<std::int64_t>();
    r.max_length = run.at("max_length").get<std::int64_t>();
    r.input = run.value("input", std::string{});
    r.series_length = run.at("series_length").get<std::size_t>();
    r.dims = run.at("dims").get<std::size_t>();

    for (const auto& m : doc.at("motifs")) {
        Motif motif;
        motif.index = m.at("index").get<std::size_t>();
        motif.spread = number_or_inf(m.at("spread"));
        motif.representative = segment_from_rows(m.at("representative"), {1, r.max_length});
        for (const auto& s : m.at("supports")) {
            MotifSupport sup;
            sup.gene.start = s.at("start").get<std::int64_t>();
            sup.gene.length = s.at("length").get<std::int64_t>();
            sup.gene.indicator = s.at("indicator").get<double>();
            sup.original = segment_from_rows(s.at("original"), sup.gene.interval());
            sup.prepared = segment_from_rows(s.at("prepared"), sup.gene.interval());
            motif.supports.push_back(std::move(sup));
        }
        report.motifs.push_back(std::move(motif));
    }
    if (report.motifs.size() != r.k) throw std::runtime_error("report: motif count does not match k");
    for (const auto& m : report.motifs) {
        if (m.supports.size() != r.support) throw std::runtime_error("report: support count does not match s");
    }
    return report;
}

}  // namespace

TaskSpec MotifReport::task() const {
    TaskSpec task;
    task.k = run.k;
    task.support = run.support;
    task.min_length = run.min_length;
    task.max_length = run.max_length;
    task.fitness.index = parse_validity_index(run.index);
    task.fitness.representative = parse_representative(run.representative);
    task.fitness.dissimilarity = dissimilarity_by_name(run.dissimilarity);
    task.fitness.znorm = run.znorm;
    task.fitness.overlap_tolerance = run.overlap_tolerance;
    return task;
}

Solution MotifReport::solution() const {
    Solution sol;
    for (const auto& m : motifs) {
        for (const auto& s : m.supports) sol.push_back(s.gene);
    }
    return sol;
}

MotifReport build_report(const TimeSeries& z, const TaskSpec& task, const GaParams& params,
                         const EvolveResult& result, const std::string& input) {
    MotifReport report;
    RunInfo& r = report.run;
    r.fitness = result.best_fitness;
    r.index = to_string(task.fitness.index);
    r.representative = to_string(task.fitness.representative);
    r.dissimilarity = task.fitness.dissimilarity.name;
    r.znorm = task.fitness.znorm;
    r.overlap_tolerance = task.fitness.overlap_tolerance;
    r.elapsed_ms = result.elapsed_ms;
    r.generations = result.generations;
    r.evaluations = result.evaluations;
    r.cancelled = result.cancelled;
    r.seed = params.seed;
    r.population_size = params.population_size;
    r.sigma = params.sigma;
    r.threads = params.threads;
    r.tournament_selection = params.tournament_selection;
    if (params.budget.time_limit)
        r.time_limit_ms = std::chrono::duration<double, std::milli>(*params.budget.time_limit).count();
    r.generation_limit = params.budget.generation_limit;
    r.k = task.k;
    r.support = task.support;
    r.min_length = task.min_length;
    r.max_length = task.max_length;
    r.input = input;
    r.series_length = z.length();
    r.dims = z.dims();

    const auto& genes = result.best;
    const auto max_len = static_cast<std::size_t>(task.max_length);
    const auto prepared = prepare_segments(z, genes, max_len, task.fitness.znorm);
    const auto order = indicator_order(genes);
    const auto groups = group_segments(prepared, order, task.support);

    for (std::size_t i = 0; i < groups.motif_count(); ++i) {
        Motif m;
        m.index = i + 1;
        const auto& members = groups.groups[i];
        m.representative = motif_representative(members, task.fitness.representative, task.fitness.dissimilarity);
        m.spread = mean_dissim(m.representative, members, task.fitness.dissimilarity);
        for (std::size_t u = 0; u < task.support; ++u) {
            const Gene& g = genes[order[i * task.support + u]];
            m.supports.push_back({g, extract_segment(z, g.start, g.length), members[u]});
        }
        report.motifs.push_back(std::move(m));
    }
    return report;
}

std::string report_to_string(const MotifReport& report) {
    return to_json(report).dump(2) + "\n";
}

MotifReport report_from_string(const std::string& text) {
    try {
        return from_json(json::parse(text));
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("malformed report: ") + e.what());
    }
}

void write_report(const MotifReport& report, const std::string& path) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write '" + path + "'");
        out << report_to_string(report);
        if (!out) {
            out.close();
            std::filesystem::remove(tmp);
            throw std::runtime_error("write to '" + path + "' failed");
        }
    }
    std::filesystem::rename(tmp, path);
}

MotifReport read_report(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return report_from_string(buf.str());
}

double rescore_report(const MotifReport& report, const TimeSeries& z) {
    const TaskSpec task = report.task();
    return goodness(z, report.solution(), task.fitness, static_cast<std::size_t>(task.max_length), task.support);
}

}  // namespace genmotif
