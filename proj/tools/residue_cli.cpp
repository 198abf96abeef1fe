#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "residue/dataset.hpp"
#include "residue/encoders.hpp"
#include "residue/error.hpp"
#include "residue/fourier.hpp"
#include "residue/harness.hpp"
#include "residue/keyvalue.hpp"
#include "residue/mlp.hpp"

namespace fs = std::filesystem;
using namespace residue;

namespace {

void emit(const std::string& out_path, const std::string& content) {
    if (out_path.empty() || out_path == "-") {
        std::cout << content;
        std::cout.flush();
    } else {
        write_file_atomic(out_path, content);
    }
}

std::string escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        if (c == '\n') {
            out += "\\n";
            continue;
        }
        out += c;
    }
    return out;
}

int fail(std::string_view code, std::string_view message) {
    std::cerr << "error code=" << code << " message=\"" << escape(message) << "\"\n";
    return 1;
}

LabeledDataset train_rows(const LabeledDataset& d) {
    return d.split.test_count == 0 ? d : split(d).train;
}

LabeledDataset test_rows(const LabeledDataset& d, bool all_rows) {
    return all_rows || d.split.test_count == 0 ? d : split(d).test;
}

std::string fourier_summary(const FourierModel& m) {
    std::string s = "p=" + std::to_string(m.modulus()) + " J=" + std::to_string(m.basis.pair_count);
    if (m.diagnostics) {
        s += " r_squared=" + format_real(m.diagnostics->r_squared) +
             " condition=" + format_real(m.diagnostics->condition_estimate) +
             " rank_warning=" + (m.diagnostics->rank_warning ? "1" : "0");
    }
    return s;
}

struct ConfigFlags {
    std::optional<std::uint64_t> p;
    std::optional<std::string> model;
    std::optional<std::string> encoder;
    std::optional<std::size_t> count;
    std::optional<double> train_fraction;
    std::optional<std::string> replicate_seeds;
    std::optional<double> round_tolerance;
    std::optional<std::string> terms;
    std::optional<std::string> extended_basis;
    std::optional<std::string> hidden;
    std::optional<std::string> output_activation;
    std::optional<double> learning_rate;
    std::optional<int> epochs;
    std::optional<int> batch_size;

    void bind(CLI::App* app) {
        app->add_option("--p", p, "Modulus");
        app->add_option("--model", model, "fourier | fourier_closed_form | mlp");
        app->add_option("--encoder", encoder, "Encoder kind (networks)");
        app->add_option("--count", count, "Samples per replicate");
        app->add_option("--train-fraction", train_fraction, "Leading share used for fitting");
        app->add_option("--replicate-seeds", replicate_seeds, "Comma-separated dataset seeds");
        app->add_option("--round-tolerance", round_tolerance, "Confidence tolerance for Fourier rounding");
        app->add_option("--terms", terms, "sine_cosine | sine_only | cosine_only");
        app->add_option("--extended-basis", extended_basis, "Use j = 1..p-1 (0 or 1)");
        app->add_option("--hidden", hidden, "Comma-separated hidden widths");
        app->add_option("--output-activation", output_activation, "sigmoid | sine_shift | softmax");
        app->add_option("--learning-rate", learning_rate, "SGD step size");
        app->add_option("--epochs", epochs, "Training epochs");
        app->add_option("--batch-size", batch_size, "Mini-batch size");
    }

    KeyValues overrides() const {
        KeyValues kv;
        if (p) kv.set("p", std::to_string(*p));
        if (model) kv.set("model", *model);
        if (encoder) kv.set("encoder", *encoder);
        if (count) kv.set("count", std::to_string(*count));
        if (train_fraction) kv.set("train_fraction", format_real(*train_fraction));
        if (replicate_seeds) kv.set("replicate_seeds", *replicate_seeds);
        if (round_tolerance) kv.set("round_tolerance", format_real(*round_tolerance));
        if (terms) kv.set("terms", *terms);
        if (extended_basis) kv.set("extended_basis", *extended_basis);
        if (hidden) kv.set("hidden", *hidden);
        if (output_activation) kv.set("output_activation", *output_activation);
        if (learning_rate) kv.set("learning_rate", format_real(*learning_rate));
        if (epochs) kv.set("epochs", std::to_string(*epochs));
        if (batch_size) kv.set("batch_size", std::to_string(*batch_size));
        return kv;
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Residue classification experiments: datasets, encoders, Fourier and network models"};
    app.set_version_flag("--version", std::string(version_string()));
    app.require_subcommand(1);

    // generate
    auto* gen = app.add_subcommand("generate", "Sample a labelled dataset");
    std::uint64_t gen_seed = 1, gen_p = 3;
    std::size_t gen_count = 30000;
    std::optional<double> gen_fraction;
    std::string gen_out;
    gen->add_option("--seed", gen_seed, "Dataset seed")->capture_default_str();
    gen->add_option("--count", gen_count, "Number of samples")->capture_default_str();
    gen->add_option("--p", gen_p, "Modulus")->capture_default_str();
    gen->add_option("--train-fraction", gen_fraction, "Record a train/test split in the metadata");
    gen->add_option("--out", gen_out, "CSV path (a .meta file is written beside it)")->required();

    // encode
    auto* enc = app.add_subcommand("encode", "Encode a dataset into a feature CSV");
    std::string enc_data, enc_kind, enc_out;
    enc->add_option("--data", enc_data, "Dataset CSV")->required();
    enc->add_option("--encoder", enc_kind, "Encoder kind")->required();
    enc->add_option("--out", enc_out, "Feature CSV path, '-' for stdout")->default_val("-");

    // fit-fourier
    auto* ff = app.add_subcommand("fit-fourier", "Least-squares Fourier fit on the training rows");
    std::string ff_data, ff_out, ff_terms = "sine_cosine";
    double ff_tol = kDefaultRoundTolerance;
    bool ff_extended = false, ff_closed = false;
    std::uint64_t ff_p = 0;
    ff->add_option("--data", ff_data, "Dataset CSV");
    ff->add_option("--p", ff_p, "Modulus (closed form only)");
    ff->add_option("--terms", ff_terms, "sine_cosine | sine_only | cosine_only")->capture_default_str();
    ff->add_flag("--extended-basis", ff_extended, "Use j = 1..p-1");
    ff->add_flag("--closed-form", ff_closed, "Emit the exact interpolation coefficients instead of fitting");
    ff->add_option("--round-tolerance", ff_tol, "Confidence tolerance")->capture_default_str();
    ff->add_option("--out", ff_out, "Model path, '-' for stdout")->default_val("-");

    // fit-mlp
    auto* fm = app.add_subcommand("fit-mlp", "Train a feed-forward network");
    std::string fm_data, fm_encoder = "raw", fm_activation = "sigmoid", fm_hidden = "64,32", fm_out, fm_history;
    MlpConfig fm_cfg;
    fm->add_option("--data", fm_data, "Dataset CSV")->required();
    fm->add_option("--encoder", fm_encoder, "Encoder kind")->capture_default_str();
    fm->add_option("--hidden", fm_hidden, "Comma-separated hidden widths")->capture_default_str();
    fm->add_option("--output-activation", fm_activation, "sigmoid | sine_shift | softmax")->capture_default_str();
    fm->add_option("--learning-rate", fm_cfg.learning_rate, "SGD step size")->capture_default_str();
    fm->add_option("--epochs", fm_cfg.epochs, "Training epochs")->capture_default_str();
    fm->add_option("--batch-size", fm_cfg.batch_size, "Mini-batch size")->capture_default_str();
    fm->add_option("--seed", fm_cfg.seed, "Initialisation and shuffling seed")->capture_default_str();
    fm->add_option("--validation-fraction", fm_cfg.validation_fraction, "Trailing share held out each epoch")
        ->capture_default_str();
    fm->add_option("--out", fm_out, "Model path, '-' for stdout")->default_val("-");
    fm->add_option("--history", fm_history, "Training history CSV path");

    // evaluate
    auto* ev = app.add_subcommand("evaluate", "Accuracy of a saved model on a dataset");
    std::string ev_model, ev_data;
    bool ev_all = false;
    ev->add_option("--model", ev_model, "Model file")->required();
    ev->add_option("--data", ev_data, "Dataset CSV")->required();
    ev->add_flag("--all-rows", ev_all, "Score every row instead of the recorded test rows");

    // run
    auto* rn = app.add_subcommand("run", "Run an experiment from a config file and flag overrides");
    std::string rn_config, rn_out, rn_artifacts;
    ConfigFlags rn_flags;
    rn->add_option("--config", rn_config, "key=value config file");
    rn_flags.bind(rn);
    rn->add_option("--out", rn_out, "Report CSV path, '-' for stdout")->default_val("-");
    rn->add_option("--artifacts", rn_artifacts, "Directory for per-replicate models and histories");

    // reproduce-table
    auto* rt = app.add_subcommand("reproduce-table", "Re-run a published table and check it");
    std::string rt_name, rt_out = "tables";
    rt->add_option("name", rt_name, "Table name")->required();
    rt->add_option("--out", rt_out, "Output directory")->capture_default_str();

    // emit-plot-data
    auto* pd = app.add_subcommand("emit-plot-data", "x,value rows for the sawtooth or a fitted curve");
    std::string pd_kind = "sawtooth", pd_model, pd_out;
    std::uint64_t pd_p = 3;
    Grid pd_grid;
    bool pd_closed = false;
    pd->add_option("--kind", pd_kind, "sawtooth | fitted_curve")->capture_default_str();
    pd->add_option("--p", pd_p, "Modulus")->capture_default_str();
    pd->add_option("--start", pd_grid.start, "Grid start")->capture_default_str();
    pd->add_option("--stop", pd_grid.stop, "Grid stop")->capture_default_str();
    pd->add_option("--step", pd_grid.step, "Grid step")->capture_default_str();
    pd->add_flag("--closed-form", pd_closed, "Use the exact coefficients for fitted_curve");
    pd->add_option("--model", pd_model, "Evaluate a saved Fourier model instead");
    pd->add_option("--out", pd_out, "CSV path, '-' for stdout")->default_val("-");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return fail("usage", e.what());
    }

    try {
        if (*gen) {
            auto d = generate(gen_seed, gen_count, Modulus(gen_p));
            if (gen_fraction) set_split(d, *gen_fraction);
            save_dataset(d, gen_out);
            std::cout << "samples=" << d.size() << " train=" << d.split.train_count << " test=" << d.split.test_count
                      << "\n";
        } else if (*enc) {
            const auto d = load_dataset(enc_data);
            emit(enc_out, to_csv(encode_dataset(d, make_encoder(parse_encoder_kind(enc_kind)))));
        } else if (*ff) {
            FourierModel m;
            if (ff_closed) {
                if (ff_p == 0) {
                    if (ff_data.empty()) throw Error(errc::kInvalidConfig, "--closed-form needs --p or --data");
                    ff_p = load_dataset(ff_data).modulus.value();
                }
                m = closed_form_coefficients(Modulus(ff_p));
                m.round_tolerance = ff_tol;
            } else {
                if (ff_data.empty()) throw Error(errc::kInvalidConfig, "--data is required unless --closed-form");
                const auto d = load_dataset(ff_data);
                KeyValues kv;
                kv.set("terms", ff_terms);
                const auto terms = apply_key_values({}, kv).terms;
                const auto basis = ff_extended ? extended_basis_spec(d.modulus) : basis_spec(d.modulus);
                m = fit_fourier(train_rows(d), with_terms(basis, terms), ff_tol);
            }
            emit(ff_out, serialize(m));
            if (!ff_out.empty() && ff_out != "-") std::cout << fourier_summary(m) << "\n";
        } else if (*fm) {
            const auto d = load_dataset(fm_data);
            const auto features = encode_dataset(train_rows(d), make_encoder(parse_encoder_kind(fm_encoder)));
            fm_cfg.input_dim = features.spec.width;
            fm_cfg.output_dim = static_cast<int>(d.modulus.value());
            fm_cfg.hidden.clear();
            for (auto h : parse_uints(fm_hidden)) fm_cfg.hidden.push_back(static_cast<int>(h));
            fm_cfg.output_activation = parse_output_activation(fm_activation);
            const auto model = train(init(fm_cfg), features);
            emit(fm_out, serialize(model));
            if (!fm_history.empty()) write_file_atomic(fm_history, history_csv(model));
            if (!fm_out.empty() && fm_out != "-") {
                const auto& last = model.history.back();
                std::cout << "epochs=" << last.epoch << " loss=" << format_real(last.loss)
                          << " val_accuracy=" << format_real(last.val_accuracy) << "\n";
            }
        } else if (*ev) {
            const auto text = read_file(ev_model);
            const auto kind = KeyValues::parse(text).at("kind");
            const auto d = test_rows(load_dataset(ev_data), ev_all);
            double acc = 0.0;
            if (kind == "fourier") {
                acc = evaluate_accuracy(parse_fourier_model(text), d);
            } else if (kind == "mlp") {
                const auto m = parse_mlp_model(text);
                if (static_cast<std::uint64_t>(m.config.output_dim) != d.modulus.value())
                    throw Error(errc::kModulusMismatch, "model has " + std::to_string(m.config.output_dim) +
                                                            " classes, data uses p=" +
                                                            std::to_string(d.modulus.value()));
                acc = evaluate(m, encode_dataset(d, make_encoder(parse_encoder_kind(m.config.encoder))));
            } else {
                throw Error(errc::kMalformed, "unknown model kind '" + kind + "'");
            }
            std::cout << "rows=" << d.size() << " accuracy=" << format_real(acc) << "\n";
        } else if (*rn) {
            ExperimentConfig cfg;
            if (!rn_config.empty()) cfg = apply_key_values(cfg, KeyValues::parse(read_file(rn_config)));
            cfg = apply_key_values(cfg, rn_flags.overrides());
            const auto report = run(cfg);
            emit(rn_out, report_csv(report));
            if (!rn_artifacts.empty()) {
                fs::create_directories(rn_artifacts);
                for (const auto& r : report.replicates) {
                    const auto stem = fs::path(rn_artifacts) / ("seed" + std::to_string(r.seed));
                    write_file_atomic(stem.string() + "_model.txt", r.model_text);
                    if (!r.history.empty()) write_file_atomic(stem.string() + "_history.csv", r.history);
                }
            }
            if (!rn_out.empty() && rn_out != "-")
                std::cout << "mean=" << format_real(report.mean_accuracy)
                          << " std=" << format_real(report.std_accuracy) << "\n";
        } else if (*rt) {
            const auto bundle = reproduce_table(rt_name);
            write_bundle(bundle, rt_out);
            std::cout << "table=" << bundle.table << " files=" << bundle.files.size()
                      << " result=" << (bundle.all_pass ? "pass" : "fail") << "\n";
            return bundle.all_pass ? 0 : 3;
        } else if (*pd) {
            if (!pd_model.empty()) {
                emit(pd_out, emit_plot_data(parse_fourier_model(read_file(pd_model)), pd_grid));
            } else {
                emit(pd_out, emit_plot_data(parse_plot_kind(pd_kind), Modulus(pd_p), pd_grid, pd_closed));
            }
        }
    } catch (const Error& e) {
        return fail(e.code(), e.what());
    } catch (const fs::filesystem_error& e) {
        return fail(errc::kIo, e.what());
    } catch (const std::exception& e) {
        return fail("internal", e.what());
    }
    return 0;
}
