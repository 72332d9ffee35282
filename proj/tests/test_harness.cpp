#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "bslab/commands.hpp"
#include "bslab/errors.hpp"

using namespace bslab;

namespace {

const char* kSmallConfig = R"(
# two potentials on a small square
seed = 42
threads = 1

[domain]
dim = 2
extent = 1.0 1.0
res = 12 12

[potential1]
kind = gaussian_bump
amplitude = 3.0
center = 0.5 0.5
width = 0.2

[potential2]
kind = constant
amplitude = 0.0

[spectra]
k = full
tol = 1e-10
trace_scheme = flux1

[isozaki]
xi_list = 0 0 ; 6.283185307179586 0
tau_list = 2.5 3.2
route = direct
fgrid_xi_max = 6.283185307179586

[verify]
lambda_list = -100 -1000 -10000
samples = 6

[output]
dir = OUTDIR
)";

// larger grid so the probe frequencies sit in the asymptotic regime the
// decay checks assume (ceiling 1/(4h) = 8.25)
const char* kVerifyConfig = R"(
seed = 7

[domain]
dim = 2
extent = 1.0 1.0
res = 32 32

[potential1]
kind = gaussian_bump
amplitude = 5.0
center = 0.5 0.5
width = 0.1

[potential2]
kind = constant
amplitude = 0.0

[spectra]
k = 40
tol = 1e-10
trace_scheme = flux1

[isozaki]
xi_list = 0 0
tau_list = 4 8 16 32
route = direct

[verify]
lambda_list = -100 -1000 -10000
samples = 6

[output]
dir = OUTDIR
)";

std::string with_outdir(const std::string& text, const std::string& dir) {
    std::string s = text;
    const auto pos = s.find("OUTDIR");
    s.replace(pos, 6, dir);
    return s;
}

std::filesystem::path fresh_dir(const char* name) {
    const auto dir = std::filesystem::temp_directory_path() / name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

std::vector<unsigned char> slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("config parse, validation, round trip") {
    const RunConfig cfg = parse_config(with_outdir(kSmallConfig, "/tmp/x"));
    CHECK(cfg.domain.dim == 2);
    CHECK(cfg.domain.res[0] == 12);
    CHECK(cfg.q1.kind == PotentialKind::gaussian_bump);
    CHECK(cfg.spectra.K == 0);
    CHECK(cfg.effective_K() == 144);
    CHECK(cfg.isozaki.xi_list.size() == 2);
    CHECK(cfg.seed == 42);

    // serialize -> parse is the identity on the serialized form
    const std::string text = serialize_config(cfg);
    const RunConfig back = parse_config(text);
    CHECK(serialize_config(back) == text);

    // every potential kind survives the round trip
    RunConfig kinds = cfg;
    kinds.q1.kind = PotentialKind::cosine_separable;
    kinds.q1.amplitude = 0.75;
    kinds.q1.mode = {1, 2, 0};
    kinds.q2.kind = PotentialKind::inverse_power;
    kinds.q2.amplitude = 1.0;
    kinds.q2.center = {0.511, 0.493, 0.0};
    kinds.q2.exponent = 0.8;
    const std::string ktext = serialize_config(kinds);
    const RunConfig kback = parse_config(ktext);
    CHECK(kback.q1.mode[1] == 2);
    CHECK(kback.q2.exponent == doctest::Approx(0.8).epsilon(1e-15));
    CHECK(serialize_config(kback) == ktext);
}

TEST_CASE("config rejects unknown keys, bad sections, bad values") {
    CHECK_THROWS_AS(parse_config("[domain]\nbogus = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[nosuch]\nx = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[domain]\ndim = 2\nextent = 1 1\nres = 2 8\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[domain]\ndim = 2\nextent = 1\nres = 8 8\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[spectra]\ntol = -1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[potential1]\nkind = wavelet\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[perturbation]\nmode = what\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("no_equals_sign\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[isozaki]\ntau_list = 4 3\n"), ConfigError);
}

TEST_CASE("forward writes deterministic datasets that match the closed form") {
    const auto dir1 = fresh_dir("bslab_fwd1");
    const auto dir2 = fresh_dir("bslab_fwd2");

    // 1-D q = 0 config: dataset eigenvalues are the closed-form FD values
    std::ostringstream cfgText;
    cfgText << "[domain]\ndim = 1\nextent = 1\nres = 5\n"
            << "[potential1]\nkind = constant\namplitude = 0\n"
            << "[potential2]\nkind = constant\namplitude = 0\n"
            << "[spectra]\nk = full\ntol = 1e-11\ntrace_scheme = flux1\n"
            << "[output]\ndir = " << dir1.string() << '\n';
    RunConfig cfg = parse_config(cfgText.str());

    std::ostringstream log;
    cmd_forward(cfg, log);
    const SpectralDataset ds = load_dataset((dir1 / "dataset1.bsd").string());
    CHECK(ds.K == 5);
    const double h = 1.0 / 6.0;
    for (int k = 0; k < 5; ++k) {
        const double expect =
            4.0 / (h * h) * std::pow(std::sin((k + 1) * M_PI * h / 2.0), 2);
        CHECK(ds.eigenvalues[k] == doctest::Approx(expect).epsilon(1e-10));
    }

    // identical config and seed give bitwise-identical files
    cfg.output_dir = dir2.string();
    cmd_forward(cfg, log);
    CHECK(slurp(dir1 / "dataset1.bsd") == slurp(dir2 / "dataset1.bsd"));
    CHECK(slurp(dir1 / "dataset2.bsd") == slurp(dir2 / "dataset2.bsd"));

    std::filesystem::remove_all(dir1);
    std::filesystem::remove_all(dir2);
}

TEST_CASE("forward with a perturbation block synthesizes the second dataset") {
    const auto dir = fresh_dir("bslab_fwd_pert");
    std::string text = with_outdir(kSmallConfig, dir.string());
    text += "\n[perturbation]\nmode = eigen_shift_decaying\nmagnitude = 0.25\n";
    const RunConfig cfg = parse_config(text);
    std::ostringstream log;
    cmd_forward(cfg, log);
    const SpectralDataset ds1 = load_dataset((dir / "dataset1.bsd").string());
    const SpectralDataset ds2 = load_dataset((dir / "dataset2.bsd").string());
    CHECK(ds2.eigenvalues[0] - ds1.eigenvalues[0] == doctest::Approx(0.25).epsilon(1e-9));
    CHECK((ds2.traces - ds1.traces).cwiseAbs().maxCoeff() == 0.0);
    std::filesystem::remove_all(dir);
}

TEST_CASE("reconstruct command: both routes agree and identical potentials give zero") {
    const auto dir = fresh_dir("bslab_rec");
    std::string text = with_outdir(kSmallConfig, dir.string());
    text.replace(text.find("route = direct"), 14, "route = both  ");
    const RunConfig cfg = parse_config(text);
    std::ostringstream log;
    cmd_reconstruct(cfg, log);
    CHECK(std::filesystem::exists(dir / "reconstruction_direct.bsd"));
    CHECK(std::filesystem::exists(dir / "reconstruction_series.csv"));
    const std::string out = log.str();
    CHECK(out.find("route gap") != std::string::npos);

    // identical potentials, series route: exact zero field
    std::string zero_text = with_outdir(kSmallConfig, dir.string());
    zero_text.replace(zero_text.find("amplitude = 3.0"), 15, "amplitude = 0.0");
    zero_text.replace(zero_text.find("route = direct"), 14, "route = series");
    std::ostringstream zlog;
    cmd_reconstruct(parse_config(zero_text), zlog);
    CHECK(zlog.str().find("field L2 norm 0") != std::string::npos);
    std::filesystem::remove_all(dir);
}

TEST_CASE("sweep command writes one csv per frequency") {
    const auto dir = fresh_dir("bslab_sweep");
    const RunConfig cfg = parse_config(with_outdir(kSmallConfig, dir.string()));
    std::ostringstream log;
    cmd_sweep(cfg, log);
    CHECK(std::filesystem::exists(dir / "sweep_xi0.csv"));
    CHECK(std::filesystem::exists(dir / "sweep_xi1.csv"));
    std::ifstream csv(dir / "sweep_xi0.csv");
    std::string header;
    std::getline(csv, header);
    CHECK(header == "tau,re_s,im_s,re_oracle,im_oracle,abs_err,residual_diag");
    std::filesystem::remove_all(dir);
}

TEST_CASE("verification suite passes on the small configuration") {
    const auto dir = fresh_dir("bslab_verify");
    const RunConfig cfg = parse_config(with_outdir(kVerifyConfig, dir.string()));
    std::ostringstream log;
    const VerificationReport rep = cmd_verify(cfg, "all", log);
    CHECK(rep.all_pass());
    CHECK(rep.checks.size() >= 6);

    // report file: check <tab> status <tab> measured <tab> threshold <tab> anchor
    std::ifstream tsv(dir / "report.tsv");
    std::string line;
    int lines = 0;
    while (std::getline(tsv, line)) {
        ++lines;
        CHECK(std::count(line.begin(), line.end(), '\t') == 4);
    }
    CHECK(lines == static_cast<int>(rep.checks.size()));

    CHECK_THROWS_AS(run_verification(cfg, "nonsense"), ConfigError);
    std::filesystem::remove_all(dir);
}

TEST_CASE("cli exit codes") {
    const std::string cli = BSLAB_CLI_PATH;
    const auto dir = fresh_dir("bslab_cli");
    const auto cfg_path = dir / "run.cfg";
    {
        std::ofstream out(cfg_path);
        out << with_outdir(kSmallConfig, dir.string());
    }
    auto run = [&](const std::string& args) {
        const std::string cmd = cli + " " + args + " > /dev/null 2>&1";
        const int rc = std::system(cmd.c_str());
        return WEXITSTATUS(rc);
    };

    CHECK(run("forward --config " + cfg_path.string()) == 0);
    CHECK(run("verify trace_ratio --config " + cfg_path.string()) == 0);
    CHECK(run("forward --config /nonexistent.cfg") == 3);

    // invalid domain -> config error
    const auto bad_path = dir / "bad.cfg";
    {
        std::ofstream out(bad_path);
        out << "[domain]\ndim = 2\nextent = 1 1\nres = 2 2\n";
    }
    CHECK(run("forward --config " + bad_path.string()) == 3);

    // numerical-stage failure: K larger than the basis
    const auto big_path = dir / "big.cfg";
    {
        std::string text = with_outdir(kSmallConfig, dir.string());
        text.replace(text.find("k = full"), 8, "k = 9999");
        std::ofstream out(big_path);
        out << text;
    }
    CHECK(run("forward --config " + big_path.string()) == 3);  // caught at validation

    // numerical-stage failure: perturbation drops the whole dataset
    const auto drop_path = dir / "drop.cfg";
    {
        std::string text = with_outdir(kSmallConfig, dir.string());
        text += "\n[perturbation]\nmode = drop_leading_j\nmagnitude = 5000\n";
        std::ofstream out(drop_path);
        out << text;
    }
    CHECK(run("forward --config " + drop_path.string()) == 4);

    std::filesystem::remove_all(dir);
}

TEST_CASE("grid_samples potential loads from a values file") {
    const auto dir = fresh_dir("bslab_gs");
    const auto values_path = dir / "values.txt";
    {
        std::ofstream out(values_path);
        for (int i = 0; i < 9; ++i) out << 0.5 * i << '\n';
    }
    std::ostringstream cfg;
    cfg << "[domain]\ndim = 2\nextent = 1 1\nres = 3 3\n"
        << "[potential1]\nkind = grid_samples\nvalues_file = " << values_path.string() << '\n'
        << "[potential2]\nkind = constant\namplitude = 0\n";
    const RunConfig parsed = parse_config(cfg.str());
    const Grid g = parsed.make_grid();
    const PotentialField q = sample_potential(parsed.q1, g);
    CHECK(q.values[4] == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(q.recorded_c == 0.0);
    std::filesystem::remove_all(dir);
}
