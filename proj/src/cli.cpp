#include "kentmix/cli.hpp"

#include <fmt/format.h>

#include <charconv>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "kentmix/bslm_fitter.hpp"
#include "kentmix/errors.hpp"
#include "kentmix/io.hpp"
#include "kentmix/segmentation.hpp"
#include "kentmix/selection.hpp"
#include "kentmix/simulate.hpp"

namespace kentmix {
namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct FitOptions {
  FitConfig cfg;
  std::string init = "kmeans";

  void add_to(CLI::App& cmd) {
    cmd.add_option("--seed", cfg.seed, "Random seed");
    cmd.add_option("--max-iter", cfg.max_iterations, "Maximum block iterations per restart")
        ->check(CLI::NonNegativeNumber);
    cmd.add_option("--restarts", cfg.restarts, "Number of restarts")->check(CLI::PositiveNumber);
    cmd.add_option("--bbar", cfg.bbar, "Floor on beta")->check(CLI::PositiveNumber);
    cmd.add_option("--kbar", cfg.kbar, "Floor on kappa - 2 beta")->check(CLI::PositiveNumber);
    cmd.add_option("--tol", cfg.rel_tol,
                   "Relative log-likelihood change for early stopping (0 disables)")
        ->check(CLI::NonNegativeNumber);
    cmd.add_option("--init", init, "Initialization: kmeans or random")
        ->check(CLI::IsMember({"kmeans", "random"}));
  }

  FitConfig resolved() const {
    FitConfig c = cfg;
    c.init_method = init == "random" ? InitMethod::random_frames : InitMethod::spherical_kmeans;
    return c;
  }
};

std::vector<UnitVector3> read_points(const std::string& path, bool normalize, std::ostream& out) {
  const Dataset data = load_csv(path, normalize);
  out << fmt::format("read {} rows from {} ({} skipped)\n", data.source_rows, path,
                     data.skipped_rows);
  return data.points;
}

std::optional<int> parse_g(const std::string& text) {
  if (text == "auto") return std::nullopt;
  int g = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), g);
  if (ec != std::errc() || ptr != text.data() + text.size() || g < 1) {
    throw UsageError(fmt::format("--g must be a positive integer or 'auto', got '{}'", text));
  }
  return g;
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Kent mixture fitting, model selection and clustering on the unit sphere",
               "kentmix"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);

  bool normalize = true;

  // fit
  FitOptions fit_opts;
  std::string fit_input;
  std::string fit_output;
  auto* fit_cmd = app.add_subcommand("fit", "Fit a g-component Kent mixture");
  fit_cmd->add_option("--input", fit_input, "CSV of 3-D observations")->required();
  fit_cmd->add_option("--g", fit_opts.cfg.g, "Number of components")->check(CLI::PositiveNumber);
  fit_cmd->add_option("--output", fit_output, "Model JSON output")->required();
  fit_cmd->add_flag("--normalize,!--no-normalize", normalize,
                    "Project rows onto the sphere (otherwise rows must be unit vectors)");
  fit_opts.add_to(*fit_cmd);

  // select
  FitOptions sel_opts;
  std::string sel_input;
  std::string sel_output;
  std::string sel_model_output;
  int gmin = 1;
  int gmax = 10;
  auto* sel_cmd = app.add_subcommand("select", "Choose g by the BIC-like criterion");
  sel_cmd->add_option("--input", sel_input, "CSV of 3-D observations")->required();
  sel_cmd->add_option("--gmin", gmin, "Smallest g")->check(CLI::PositiveNumber);
  sel_cmd->add_option("--gmax", gmax, "Largest g")->check(CLI::PositiveNumber);
  sel_cmd->add_option("--output", sel_output, "Selection table CSV")->required();
  sel_cmd->add_option("--model-output", sel_model_output, "Optional JSON of the selected model");
  sel_cmd->add_flag("--normalize,!--no-normalize", normalize, "Project rows onto the sphere");
  sel_opts.add_to(*sel_cmd);

  // cluster
  std::string clu_model;
  std::string clu_input;
  std::string clu_output;
  ShapeFloors clu_floors;
  auto* clu_cmd = app.add_subcommand("cluster", "Label observations with a fitted model");
  clu_cmd->add_option("--model", clu_model, "Model JSON")->required();
  clu_cmd->add_option("--input", clu_input, "CSV of 3-D observations")->required();
  clu_cmd->add_option("--output", clu_output, "Labels CSV output")->required();
  clu_cmd->add_option("--bbar", clu_floors.bbar, "Floor on beta used to validate the model");
  clu_cmd->add_option("--kbar", clu_floors.kbar, "Floor on kappa - 2 beta used to validate");
  clu_cmd->add_flag("--normalize,!--no-normalize", normalize, "Project rows onto the sphere");

  // simulate
  FitOptions sim_opts;
  std::string study = "s1";
  std::size_t sim_n = 1000;
  int reps = 20;
  std::string sim_output;
  int sim_gmin = 2;
  int sim_gmax = 10;
  auto* sim_cmd = app.add_subcommand("simulate", "Run a simulation study");
  sim_cmd->add_option("--study", study, "Study protocol")
      ->check(CLI::IsMember({"s1", "s2", "s3", "s4"}));
  sim_cmd->add_option("--n", sim_n, "Observations per replication")->check(CLI::PositiveNumber);
  sim_cmd->add_option("--reps", reps, "Replications")->check(CLI::PositiveNumber);
  sim_cmd->add_option("--output", sim_output, "Result JSON output")->required();
  sim_cmd->add_option("--gmin", sim_gmin, "Smallest g for s3")->check(CLI::PositiveNumber);
  sim_cmd->add_option("--gmax", sim_gmax, "Largest g for s3")->check(CLI::PositiveNumber);
  sim_opts.add_to(*sim_cmd);

  // segment
  FitOptions seg_opts;
  std::string seg_image;
  std::string seg_g = "auto";
  std::string seg_labels;
  std::string seg_recolor;
  auto* seg_cmd = app.add_subcommand("segment", "Segment a PPM image by pixel colour direction");
  seg_cmd->add_option("--image", seg_image, "Input PPM (P3 or P6, maxval 255)")->required();
  seg_cmd->add_option("--g", seg_g, "Number of components, or auto");
  seg_cmd->add_option("--labels", seg_labels, "Per-pixel labels CSV output")->required();
  seg_cmd->add_option("--recolor", seg_recolor, "Optional recoloured PPM output");
  seg_opts.add_to(*seg_cmd);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();  // program name
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (fit_cmd->parsed()) {
      const std::vector<UnitVector3> points = read_points(fit_input, normalize, out);
      const FitReport rep = fit(points, fit_opts.resolved());
      write_file(fit_output, model_to_json(rep.model));
      out << fmt::format("g={} loglik={:.10g} iterations={} restart={} violations={}\n",
                         rep.model.g(), rep.final_loglik(), rep.iterations_run,
                         rep.restart_index_of_best, rep.monotonicity_violations);
    } else if (sel_cmd->parsed()) {
      if (gmin > gmax) throw UsageError(fmt::format("--gmin {} exceeds --gmax {}", gmin, gmax));
      const std::vector<UnitVector3> points = read_points(sel_input, normalize, out);
      const SelectionTable table = select_g(points, gmin, gmax, sel_opts.resolved());
      write_file(sel_output, selection_table_to_csv(table));
      if (!sel_model_output.empty()) {
        write_file(sel_model_output, model_to_json(table.selected().report.model));
      }
      for (const std::string& w : table.warnings) err << "warning: " << w << "\n";
      out << fmt::format("selected g={}\n", table.selected_g);
    } else if (clu_cmd->parsed()) {
      const MixtureModel model = model_from_json(read_file(clu_model), clu_floors);
      const std::vector<UnitVector3> points = read_points(clu_input, normalize, out);
      write_file(clu_output, labels_to_csv(map_classify(points, model)));
      out << fmt::format("labelled {} observations\n", points.size());
    } else if (sim_cmd->parsed()) {
      if (sim_gmin > sim_gmax) {
        throw UsageError(fmt::format("--gmin {} exceeds --gmax {}", sim_gmin, sim_gmax));
      }
      StudySpec spec;
      spec.study = parse_study(study);
      spec.n = sim_n;
      spec.reps = reps;
      spec.seed = sim_opts.cfg.seed;
      const StudyResult result = run_study(spec, sim_opts.resolved(), sim_gmin, sim_gmax);
      write_file(sim_output, study_result_to_json(result));
      out << fmt::format("study {} finished: {} reps, {} failures\n", study, reps,
                         result.failures);
    } else if (seg_cmd->parsed()) {
      const std::optional<int> g = parse_g(seg_g);
      const ImageGrid img = load_ppm(seg_image);
      const Segmentation seg = segment_image(img, g, seg_opts.resolved());
      write_file(seg_labels, labels_to_csv(seg.labels));
      if (!seg_recolor.empty()) save_ppm(seg_recolor, recolor(img, seg.labels));
      out << fmt::format("segmented {}x{} image into g={}\n", img.width, img.height,
                         seg.model.g());
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitOk;
}

}  // namespace kentmix
