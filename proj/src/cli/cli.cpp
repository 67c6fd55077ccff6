// Copyright 2026-present the dsah project
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dsah/cli/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <optional>
#include <sstream>

#include "dsah/common/binary_io.hpp"
#include "dsah/common/config_file.hpp"
#include "dsah/common/error.hpp"
#include "dsah/data/dataset.hpp"
#include "dsah/data/synthetic.hpp"
#include "dsah/networks/model.hpp"
#include "dsah/retrieval/binary_codes.hpp"
#include "dsah/retrieval/encode.hpp"
#include "dsah/retrieval/evaluation.hpp"
#include "dsah/trainer/trainer.hpp"
#include "svg.hpp"

namespace dsah::cli {
namespace fs = std::filesystem;

namespace {

// Options shared by every command. Flags win over the config file.
struct Common {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> bits;
    std::string out;

    KeyValues values;

    void load() {
        if (!config.empty()) {
            values = read_key_value_file(config);
            reject_unknown_keys(values, config);
        }
        if (seed) values["seed"] = values["data.seed"] = std::to_string(*seed);
        if (bits) values["bits"] = std::to_string(*bits);
        if (!out.empty()) values["out"] = out;
    }

    std::string require(const std::string& key, const std::string& flag_value = {}) const {
        if (!flag_value.empty()) return flag_value;
        const auto it = values.find(key);
        if (it == values.end() || it->second.empty()) {
            throw ConfigError("missing required '" + key + "' (flag --" + key + " or config key)");
        }
        return it->second;
    }

    std::string optional_value(const std::string& key, const std::string& flag_value = {}) const {
        if (!flag_value.empty()) return flag_value;
        const auto it = values.find(key);
        return it == values.end() ? std::string{} : it->second;
    }
};

void add_common(CLI::App& cmd, Common& c, bool with_bits) {
    cmd.add_option("--config", c.config, "key = value run config");
    cmd.add_option("--seed", c.seed, "RNG seed");
    if (with_bits) cmd.add_option("--bits", c.bits, "code length");
    cmd.add_option("--out", c.out, "output directory");
}

fs::path out_dir(const Common& c) {
    const fs::path dir = c.require("out");
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
    return dir;
}

retrieval::BinaryCodeSet read_codes(const std::string& path) { return retrieval::read_code_file(path); }

void require_same_bits(const retrieval::BinaryCodeSet& a, const retrieval::BinaryCodeSet& b) {
    if (a.bits() != b.bits()) {
        throw ShapeError("code length mismatch: " + std::to_string(a.bits()) + " vs " + std::to_string(b.bits()) +
                         " bits");
    }
}

std::string format_double(double v) {
    std::ostringstream s;
    s.precision(17);
    s << v;
    return s.str();
}

int gen_data(Common& c, std::ostream& out) {
    c.load();
    data::SyntheticConfig synth;
    apply_synthetic_keys(c.values, synth);
    const fs::path dir = out_dir(c);
    const auto dataset = data::generate(synth);
    data::write_dataset(dir, dataset);
    out << "wrote " << dataset.train.size() << " train and " << dataset.test.size() << " test images to "
        << dir.string() << "\n"
        << "glyph crop accuracy " << dataset.report.patch_accuracy << ", background crop accuracy "
        << dataset.report.background_accuracy << "\n";
    return kOk;
}

int train_cmd(Common& c, const std::string& data_flag, bool quiet, std::ostream& out) {
    c.load();
    const std::string data_dir = c.require("data", data_flag);
    train::TrainConfig config;
    apply_train_keys(c.values, config);
    const auto files = data::read_dataset(data_dir);
    config.input = files.train.shape;
    config.validate();
    const fs::path dir = out_dir(c);

    const auto result = train::alternating_train(files.train, config, [&](const train::EpochRecord& r) {
        if (quiet) return;
        out << "epoch " << r.epoch << "  hashing " << r.total_hashing << "  attention " << r.total_attention
            << "  sem " << r.semantic_original << "\n";
    });
    result.model->save(dir / "model.ckpt");
    train::write_history_csv(dir / "history.csv", result.history);

    const auto db = retrieval::encode_set(*result.model, files.train);
    const auto queries = retrieval::encode_set(*result.model, files.test);
    const auto map = retrieval::mean_average_precision(queries, db);
    out << "test map " << map.value << " over " << map.evaluated << " queries\n";
    return kOk;
}

int encode_cmd(Common& c, const std::string& model_flag, const std::string& images_flag, std::ostream& out) {
    c.load();
    const auto model = nn::DsahModel::load(c.require("model", model_flag));
    const fs::path images = c.require("images", images_flag);
    const auto set = data::read_image_set(images);
    if (set.size() == 0) throw ShapeError("encode: " + images.string() + " holds no images");
    if (set.shape.channels != model->config().input.channels || set.shape.height != model->config().input.height ||
        set.shape.width != model->config().input.width) {
        throw ShapeError("encode: images are " + std::to_string(set.shape.channels) + "x" +
                         std::to_string(set.shape.height) + "x" + std::to_string(set.shape.width) +
                         " but the model expects " + std::to_string(model->config().input.channels) + "x" +
                         std::to_string(model->config().input.height) + "x" +
                         std::to_string(model->config().input.width));
    }
    const auto codes = retrieval::encode_set(*model, set);
    const fs::path target = out_dir(c) / (images.stem().string() + ".codes");
    retrieval::write_code_file(target, codes);
    out << "wrote " << codes.size() << " codes of " << codes.bits() << " bits to " << target.string() << "\n";
    return kOk;
}

int index_cmd(Common& c, const std::vector<std::string>& inputs, std::ostream& out) {
    c.load();
    if (inputs.empty()) throw ConfigError("index: no code files given");
    std::optional<retrieval::BinaryCodeSet> db;
    for (const auto& path : inputs) {
        auto part = read_codes(path);
        if (!db) {
            db = std::move(part);
        } else {
            require_same_bits(*db, part);
            db->append(part);
        }
    }
    const fs::path target = out_dir(c) / "index.codes";
    retrieval::write_code_file(target, *db);
    out << "indexed " << db->size() << " codes in " << target.string() << "\n";
    return kOk;
}

int query_cmd(Common& c, const std::string& queries_flag, const std::string& index_flag, std::size_t top,
              std::ostream& out) {
    c.load();
    const auto queries = read_codes(c.require("queries", queries_flag));
    const auto db = read_codes(c.require("index", index_flag));
    require_same_bits(queries, db);
    if (const auto t = c.optional_value("top"); !t.empty() && top == 0) top = parse_unsigned("top", t);
    if (top == 0) top = 10;

    std::ostringstream csv;
    csv << "query,rank,id,distance,relevant\n";
    for (std::size_t q = 0; q < queries.size(); ++q) {
        const auto r = retrieval::rank(queries.row(q), queries.labels(q), db, q);
        for (std::size_t i = 0; i < std::min(top, r.ids.size()); ++i) {
            csv << q << ',' << i + 1 << ',' << r.ids[i] << ',' << r.distances[i] << ','
                << static_cast<int>(r.relevant[i]) << '\n';
        }
    }
    const fs::path target = out_dir(c) / "results.csv";
    io::write_file(target, csv.str());
    out << "ranked " << queries.size() << " queries against " << db.size() << " codes, top " << top << " in "
        << target.string() << "\n";
    return kOk;
}

int eval_cmd(Common& c, const std::string& queries_flag, const std::string& index_flag, std::size_t cutoff,
             const std::string& depths_flag, std::ostream& out) {
    c.load();
    const auto queries = read_codes(c.require("queries", queries_flag));
    const auto db = read_codes(c.require("index", index_flag));
    require_same_bits(queries, db);
    if (const auto t = c.optional_value("cutoff"); !t.empty() && cutoff == 0) cutoff = parse_unsigned("cutoff", t);
    const std::optional<std::size_t> limit = cutoff ? std::optional<std::size_t>(cutoff) : std::nullopt;
    const std::string depth_text = c.optional_value("precision_at", depths_flag);
    const auto depths = depth_text.empty() ? std::vector<std::size_t>{} : parse_list("precision_at", depth_text);

    const auto map = retrieval::mean_average_precision(queries, db, limit);
    const auto precision = retrieval::precision_at(queries, db, depths);

    std::ostringstream csv;
    csv << "metric,bits,value\n";
    const std::string map_name = limit ? "map@" + std::to_string(*limit) : "map";
    csv << map_name << ',' << queries.bits() << ',' << format_double(map.value) << '\n';
    out << map_name << " " << map.value << " (" << map.evaluated << " queries, " << map.skipped
        << " without relevant items)\n";
    for (std::size_t i = 0; i < depths.size(); ++i) {
        csv << "precision@" << depths[i] << ',' << queries.bits() << ',' << format_double(precision[i]) << '\n';
        out << "precision@" << depths[i] << " " << precision[i] << "\n";
    }
    io::write_file(out_dir(c) / "metrics.csv", csv.str());
    return kOk;
}

int plot_cmd(Common& c, const std::string& queries_flag, const std::string& index_flag,
             const std::string& history_flag, std::ostream& out) {
    c.load();
    const fs::path dir = out_dir(c);
    const std::string queries_path = c.optional_value("queries", queries_flag);
    const std::string index_path = c.optional_value("index", index_flag);
    const std::string history_path = c.optional_value("history", history_flag);
    if (queries_path.empty() != index_path.empty()) {
        throw ConfigError("plot: --queries and --index go together");
    }
    if (queries_path.empty() && history_path.empty()) {
        throw ConfigError("plot: nothing to plot, give --queries/--index or --history");
    }

    if (!queries_path.empty()) {
        const auto queries = read_codes(queries_path);
        const auto db = read_codes(index_path);
        require_same_bits(queries, db);
        const auto curve = retrieval::precision_recall_curve(queries, db);
        std::ostringstream csv;
        csv << "radius,recall,precision\n";
        Series pr{std::to_string(queries.bits()) + " bits", {}};
        for (const auto& p : curve) {
            csv << p.radius << ',' << format_double(p.recall) << ',' << format_double(p.precision) << '\n';
            pr.points.emplace_back(p.recall, p.precision);
        }
        io::write_file(dir / "pr_curve.csv", csv.str());
        io::write_file(dir / "pr_curve.svg", line_chart_svg("Hamming ball precision and recall", "recall",
                                                             "precision", {pr}));
        out << "wrote " << (dir / "pr_curve.csv").string() << " and pr_curve.svg\n";
    }

    if (!history_path.empty()) {
        const auto history = train::read_history_csv(history_path);
        Series hashing{"hashing", {}}, attention{"attention", {}};
        for (const auto& r : history) {
            hashing.points.emplace_back(static_cast<double>(r.epoch), r.total_hashing);
            attention.points.emplace_back(static_cast<double>(r.epoch), r.total_attention);
        }
        io::write_file(dir / "convergence.csv", train::history_csv(history));
        io::write_file(dir / "convergence.svg",
                       line_chart_svg("Objective per epoch", "epoch", "objective", {hashing, attention}));
        out << "wrote " << (dir / "convergence.csv").string() << " and convergence.svg\n";
    }
    return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Deep saliency hashing on synthetic fine-grained images", "dsah"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "help for every subcommand");

    Common common;
    std::string data_flag, model_flag, images_flag, queries_flag, index_flag, history_flag, depths_flag;
    std::vector<std::string> inputs;
    std::size_t top = 0, cutoff = 0;
    bool quiet = false;

    auto* gen = app.add_subcommand("gen-data", "generate the synthetic dataset");
    add_common(*gen, common, false);

    auto* train = app.add_subcommand("train", "train attention and hashing networks");
    add_common(*train, common, true);
    train->add_option("--data", data_flag, "dataset directory");
    train->add_flag("--quiet", quiet, "no per-epoch lines");

    auto* encode = app.add_subcommand("encode", "encode an image split into binary codes");
    add_common(*encode, common, false);
    encode->add_option("--model", model_flag, "checkpoint file");
    encode->add_option("--images", images_flag, "image split file");

    auto* index = app.add_subcommand("index", "merge code files into one database");
    add_common(*index, common, false);
    index->add_option("--codes", inputs, "code files")->expected(1, -1);

    auto* query = app.add_subcommand("query", "rank a database for each query code");
    add_common(*query, common, false);
    query->add_option("--queries", queries_flag, "query code file");
    query->add_option("--index", index_flag, "database code file");
    query->add_option("--top", top, "results kept per query");

    auto* eval = app.add_subcommand("eval", "MAP and precision at depth");
    add_common(*eval, common, false);
    eval->add_option("--queries", queries_flag, "query code file");
    eval->add_option("--index", index_flag, "database code file");
    eval->add_option("--cutoff", cutoff, "truncate ranked lists for MAP");
    eval->add_option("--precision-at", depths_flag, "comma separated depths");

    auto* plot = app.add_subcommand("plot", "precision-recall and convergence curves");
    add_common(*plot, common, false);
    plot->add_option("--queries", queries_flag, "query code file");
    plot->add_option("--index", index_flag, "database code file");
    plot->add_option("--history", history_flag, "history.csv from train");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "dsah: " << e.what() << "\n";
        return kUsage;
    }

    try {
        if (gen->parsed()) return gen_data(common, out);
        if (train->parsed()) return train_cmd(common, data_flag, quiet, out);
        if (encode->parsed()) return encode_cmd(common, model_flag, images_flag, out);
        if (index->parsed()) return index_cmd(common, inputs, out);
        if (query->parsed()) return query_cmd(common, queries_flag, index_flag, top, out);
        if (eval->parsed()) return eval_cmd(common, queries_flag, index_flag, cutoff, depths_flag, out);
        if (plot->parsed()) return plot_cmd(common, queries_flag, index_flag, history_flag, out);
    } catch (const IoError& e) {
        err << "dsah: " << e.what() << "\n";
        return kMissingFile;
    } catch (const FormatError& e) {
        err << "dsah: " << e.what() << "\n";
        return kMalformedFile;
    } catch (const ShapeError& e) {
        err << "dsah: " << e.what() << "\n";
        return kShapeMismatch;
    } catch (const ConfigError& e) {
        err << "dsah: " << e.what() << "\n";
        return kBadConfig;
    } catch (const NumericError& e) {
        err << "dsah: " << e.what() << "\n";
        return kNumeric;
    } catch (const std::exception& e) {
        err << "dsah: " << e.what() << "\n";
        return kUsage;
    }
    return kUsage;
}

}  // namespace dsah::cli
