// Command-line front end: index / infer / evaluate / export-dot.
//
// Exit codes: 0 success, 1 pipeline completed degraded (e.g. everything
// noise), 2 input or config error.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "lakeschema/eval.hpp"
#include "lakeschema/pipeline.hpp"
#include "lakeschema/util.hpp"

namespace {

using nlohmann::json;

struct CliOptions {
    std::string input_dir;
    std::string index_path;
    std::string out;
    std::string dot_path;
    std::string report_path;
    std::string ground_truth;
    std::string schema_path;
    std::string weights_spec;
    std::vector<double> eps;
    std::vector<int> min_points;
    std::string delimiter = ",";
    bool no_header = false;
    std::vector<std::string> null_tokens;
    lakeschema::RunConfig run;
};

void add_lake_options(CLI::App* cmd, CliOptions& opt) {
    cmd->add_option("--input-dir", opt.input_dir, "Directory of delimited text files")->required();
    cmd->add_option("--delimiter", opt.delimiter, "Field delimiter (single character)");
    cmd->add_flag("--no-header", opt.no_header, "Treat the first row as data, not headers");
    cmd->add_option("--null-token", opt.null_tokens,
                    "Cell value treated as null (repeatable; default: empty, null, na, n/a)");
    cmd->add_option("--threads", opt.run.threads, "Worker threads (0 = all cores)");
    cmd->add_option("--seed", opt.run.index.seed, "Hashing seed");
}

void add_infer_options(CLI::App* cmd, CliOptions& opt) {
    cmd->add_option("--k", opt.run.k, "Table-neighbour budget (0 = number of tables)");
    cmd->add_option("--eps", opt.eps, "DBSCAN eps grid values in (0,1]");
    cmd->add_option("--min-points", opt.min_points, "DBSCAN min_points grid values");
    cmd->add_option("--match-threshold", opt.run.relate.match_threshold,
                    "Attribute-match threshold on combined similarity");
    cmd->add_option("--key-ratio", opt.run.relate.key_ratio,
                    "Min distinct ratio for a key attribute");
    cmd->add_option("--fk-containment", opt.run.relate.fk_containment,
                    "Min child-into-parent value containment");
    cmd->add_option("--weights", opt.weights_spec,
                    "Family weights, e.g. name=1,value=1,format=1,distribution=1");
    cmd->add_option("--num-hashes", opt.run.index.num_hashes, "Hash functions per signature");
    cmd->add_option("--num-trees", opt.run.index.num_trees, "Prefix trees per index");
}

void apply_options(CliOptions& opt) {
    if (opt.delimiter.size() != 1) {
        throw lakeschema::FatalError("--delimiter must be a single character");
    }
    opt.run.lake.delimiter = opt.delimiter[0];
    opt.run.lake.header = !opt.no_header;
    if (!opt.null_tokens.empty()) opt.run.lake.null_tokens = opt.null_tokens;
    if (!opt.eps.empty()) opt.run.grid.eps = opt.eps;
    if (!opt.min_points.empty()) opt.run.grid.min_points = opt.min_points;

    if (!opt.weights_spec.empty()) {
        std::stringstream ss(opt.weights_spec);
        std::string item;
        while (std::getline(ss, item, ',')) {
            auto eq = item.find('=');
            if (eq == std::string::npos) {
                throw lakeschema::FatalError("--weights entries must look like family=weight");
            }
            auto family = lakeschema::family_from_name(lakeschema::trim(item.substr(0, eq)));
            if (!family) {
                throw lakeschema::FatalError("unknown feature family in --weights: " + item);
            }
            double w = 0.0;
            if (!lakeschema::parse_number(lakeschema::trim(item.substr(eq + 1)), w) || w < 0.0) {
                throw lakeschema::FatalError("bad weight in --weights: " + item);
            }
            opt.run.index.family_weights[static_cast<std::size_t>(*family)] = w;
        }
    }
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw lakeschema::FatalError("cannot write " + path);
    out << content;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw lakeschema::FatalError("cannot open " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void print_timing_rows(std::ostream& os, const lakeschema::StageTimings& t) {
    auto row = [&](const char* label, double v) {
        os << std::left << std::setw(28) << label << std::fixed << std::setprecision(4) << v
           << "\n";
    };
    row("Build Indexes (s)", t.build_indexes_s);
    row("Build Distance Matrix (s)", t.build_distance_matrix_s);
    row("Cluster (s)", t.cluster_s);
    row("Data Profiling (s)", t.data_profiling_s);
    row("Infer Relationships (s)", t.infer_relationships_s);
}

json timings_to_json(const lakeschema::StageTimings& t) {
    return {{"build_indexes_s", t.build_indexes_s},
            {"build_distance_matrix_s", t.build_distance_matrix_s},
            {"cluster_s", t.cluster_s},
            {"data_profiling_s", t.data_profiling_s},
            {"infer_relationships_s", t.infer_relationships_s}};
}

lakeschema::StageTimings timings_from_json(const json& j) {
    lakeschema::StageTimings t;
    t.build_indexes_s = j.value("build_indexes_s", 0.0);
    t.build_distance_matrix_s = j.value("build_distance_matrix_s", 0.0);
    t.cluster_s = j.value("cluster_s", 0.0);
    t.data_profiling_s = j.value("data_profiling_s", 0.0);
    t.infer_relationships_s = j.value("infer_relationships_s", 0.0);
    return t;
}

int cmd_index(CliOptions& opt) {
    apply_options(opt);
    using Clock = std::chrono::steady_clock;

    auto t0 = Clock::now();
    lakeschema::LoadResult loaded = lakeschema::load_lake(opt.input_dir, opt.run.lake);
    auto profiles =
        lakeschema::profile_tables(loaded.tables, opt.run.lake,
                                   lakeschema::resolve_threads(opt.run.threads));
    auto t1 = Clock::now();
    auto index = lakeschema::LakeIndex::build(loaded.tables, profiles, opt.run.index,
                                              lakeschema::resolve_threads(opt.run.threads),
                                              opt.run.lake);
    auto t2 = Clock::now();
    index.save(opt.out);

    lakeschema::StageTimings t;
    t.data_profiling_s = std::chrono::duration<double>(t1 - t0).count();
    t.build_indexes_s = std::chrono::duration<double>(t2 - t1).count();
    std::cout << "Indexed " << loaded.tables.size() << " tables -> " << opt.out << "\n";
    print_timing_rows(std::cout, t);
    return 0;
}

int cmd_infer(CliOptions& opt) {
    apply_options(opt);
    std::optional<std::filesystem::path> artifact;
    if (!opt.index_path.empty()) artifact = opt.index_path;

    lakeschema::PipelineResult r = lakeschema::run_pipeline(opt.input_dir, opt.run, artifact);

    write_file(opt.out, lakeschema::schema_to_json(r.schema));
    if (!opt.dot_path.empty()) {
        write_file(opt.dot_path, lakeschema::schema_to_dot(r.schema));
    }
    if (!opt.report_path.empty()) {
        json report;
        report["params"] = {{"eps", r.schema.eps},
                            {"min_points", r.schema.min_points},
                            {"silhouette", r.schema.silhouette},
                            {"seed", opt.run.index.seed},
                            {"k", opt.run.k}};
        report["timings"] = timings_to_json(r.timings);
        report["warnings"] = r.warnings;
        write_file(opt.report_path, report.dump(2) + "\n");
    }

    std::cout << "Tables: " << r.tables.size() << "  Clusters: "
              << r.tuned.clustering.cluster_count() << "  Unclustered: "
              << r.schema.unclustered.size() << "  Relationship groups: "
              << r.schema.relationships.size() << "\n";
    std::cout << "Selected eps=" << r.schema.eps << " min_points=" << r.schema.min_points
              << " silhouette=" << r.schema.silhouette << "\n";
    print_timing_rows(std::cout, r.timings);

    for (const auto& w : r.warnings) std::cerr << "[warn] " << w << "\n";
    return r.warnings.empty() ? 0 : 1;
}

int cmd_evaluate(CliOptions& opt) {
    lakeschema::SchemaDigest schema = lakeschema::parse_schema_json(read_file(opt.schema_path));
    lakeschema::GroundTruth gt =
        lakeschema::load_ground_truth(opt.ground_truth, schema.table_ids());

    lakeschema::EvalReport report = lakeschema::evaluate_schema(schema, gt);
    const lakeschema::RandResult& cluster_rand = report.cluster_rand;
    const std::optional<lakeschema::RelationshipRandResult>& rel_rand = report.relationship_rand;

    lakeschema::StageTimings timings;
    bool have_timings = false;
    if (!opt.report_path.empty()) {
        json report = json::parse(read_file(opt.report_path));
        if (report.contains("timings")) {
            timings = timings_from_json(report["timings"]);
            have_timings = true;
        }
    }

    std::size_t n_tables = report.tables;
    auto row = [&](const char* label, const std::string& v) {
        std::cout << std::left << std::setw(28) << label << v << "\n";
    };
    std::ostringstream rand_s, rel_s;
    rand_s << std::setprecision(6) << cluster_rand.score;
    if (rel_rand) rel_s << std::setprecision(6) << rel_rand->score;

    row("Number of Tables", std::to_string(n_tables));
    row("Number of Clusters", std::to_string(report.clusters));
    row("Number of GT Clusters", std::to_string(report.gt_clusters));
    row("Cluster Rand Score", rand_s.str());
    row("Relationships Rand Score", rel_rand ? rel_s.str() : "N/A");
    {
        const auto& c = cluster_rand.counts;
        std::cout << "Cluster pairs: a=" << c.a << " b=" << c.b << " c=" << c.c << " d=" << c.d
                  << "\n";
    }
    if (rel_rand) {
        const auto& c = rel_rand->counts;
        std::cout << "Relationship pairs: a=" << c.a << " b=" << c.b << " c=" << c.c
                  << " d=" << c.d << " e=" << rel_rand->e << "\n";
    }
    if (have_timings) print_timing_rows(std::cout, timings);

    if (!opt.out.empty()) {
        json out;
        out["tables"] = n_tables;
        out["clusters"] = report.clusters;
        out["gt_clusters"] = report.gt_clusters;
        out["cluster_counts"] = {{"a", cluster_rand.counts.a},
                                 {"b", cluster_rand.counts.b},
                                 {"c", cluster_rand.counts.c},
                                 {"d", cluster_rand.counts.d}};
        out["rand"] = cluster_rand.score;
        if (rel_rand) {
            out["relationship_counts"] = {{"a", rel_rand->counts.a},
                                          {"b", rel_rand->counts.b},
                                          {"c", rel_rand->counts.c},
                                          {"d", rel_rand->counts.d},
                                          {"e", rel_rand->e}};
            out["rand_r"] = rel_rand->score;
        } else {
            out["rand_r"] = nullptr;
        }
        out["timings"] = have_timings ? timings_to_json(timings) : json(nullptr);
        write_file(opt.out, out.dump(2) + "\n");
    }
    return 0;
}

int cmd_export_dot(CliOptions& opt) {
    lakeschema::SchemaDigest digest = lakeschema::parse_schema_json(read_file(opt.schema_path));
    lakeschema::ConceptualSchema schema;
    for (std::size_t i = 0; i < digest.entity_tables.size(); ++i) {
        schema.entity_types.push_back({static_cast<int>(i), digest.entity_tables[i]});
    }
    // Cluster endpoints for edges are recovered from the JSON directly.
    json j = json::parse(read_file(opt.schema_path));
    for (const auto& rel : j.at("relationships")) {
        lakeschema::SchemaRelationship r;
        r.parent_cluster = rel.at("parent_cluster").get<int>();
        r.child_cluster = rel.at("child_cluster").get<int>();
        r.foreign_keys = rel.at("foreign_keys").get<std::vector<std::string>>();
        schema.relationships.push_back(std::move(r));
    }
    schema.unclustered = digest.unclustered;
    write_file(opt.out, lakeschema::schema_to_dot(schema));
    return 0;
}

int run_main(int argc, char** argv) {
    CLI::App app{"Schema inference for data lakes: cluster tables into entity types and group "
                 "foreign keys into conceptual relationships"};
    app.require_subcommand(1);

    CliOptions opt;

    CLI::App* index_cmd = app.add_subcommand("index", "Build and persist the LSH indexes");
    add_lake_options(index_cmd, opt);
    index_cmd->add_option("--num-hashes", opt.run.index.num_hashes, "Hash functions per signature");
    index_cmd->add_option("--num-trees", opt.run.index.num_trees, "Prefix trees per index");
    index_cmd->add_option("--out", opt.out, "Index artifact path")->required();

    CLI::App* infer_cmd = app.add_subcommand("infer", "Infer the conceptual schema");
    add_lake_options(infer_cmd, opt);
    add_infer_options(infer_cmd, opt);
    infer_cmd->add_option("--index", opt.index_path, "Reuse a persisted index artifact");
    infer_cmd->add_option("--out", opt.out, "Schema JSON path")->required();
    infer_cmd->add_option("--dot", opt.dot_path, "Also write a DOT rendering");
    infer_cmd->add_option("--report", opt.report_path, "Write params/timings JSON");

    CLI::App* eval_cmd = app.add_subcommand("evaluate", "Score a schema against ground truth");
    eval_cmd->add_option("--schema", opt.schema_path, "Schema JSON artifact")->required();
    eval_cmd->add_option("--ground-truth", opt.ground_truth, "Ground-truth JSON")->required();
    eval_cmd->add_option("--report", opt.report_path, "Timings JSON from infer");
    eval_cmd->add_option("--out", opt.out, "Write the evaluation JSON here");

    CLI::App* dot_cmd = app.add_subcommand("export-dot", "Render a schema artifact as DOT");
    dot_cmd->add_option("--schema", opt.schema_path, "Schema JSON artifact")->required();
    dot_cmd->add_option("--out", opt.out, "DOT output path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help
        app.exit(e);
        return 2;
    }

    if (app.got_subcommand(index_cmd)) return cmd_index(opt);
    if (app.got_subcommand(infer_cmd)) return cmd_infer(opt);
    if (app.got_subcommand(eval_cmd)) return cmd_evaluate(opt);
    if (app.got_subcommand(dot_cmd)) return cmd_export_dot(opt);
    return 2;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run_main(argc, argv);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (...) {
        std::cerr << "error: unknown failure\n";
        return 2;
    }
}
