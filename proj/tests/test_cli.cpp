#include <doctest.h>

#include <fstream>

#include "cspc/calibration.hpp"
#include "cspc/format.hpp"
#include "cspc/io.hpp"
#include "cspc/kernels.hpp"
#include "cspc/persist.hpp"
#include "cspc/scores.hpp"
#include "helpers.hpp"

using namespace cspc;
using testutil::run_cli;
using testutil::temp_dir;

namespace {

void write_values(const std::string& path, std::size_t n, double start, double step) {
    std::ofstream out(path);
    out << "value\n";
    for (std::size_t i = 0; i < n; ++i)
        out << start + step * static_cast<double>(i) << "\n";
}

} // namespace

TEST_CASE("calibrate prints n, k and q") {
    temp_dir dir;
    write_values(dir.file("calib.csv"), 19, 1.0, 1.0);
    const auto r = run_cli("calibrate --input " + dir.file("calib.csv") +
                               " --alpha 0.05 --out " + dir.file("m.json"),
                           dir);
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("n=19 k=19 q=9") != std::string::npos);
    CHECK(r.err.empty());
}

TEST_CASE("calibrate warns about the clamp and the required n") {
    temp_dir dir;
    write_values(dir.file("calib.csv"), 100, 0.0, 0.01);
    const auto r = run_cli("calibrate --input " + dir.file("calib.csv") +
                               " --alpha 0.0027 --out " + dir.file("m.json"),
                           dir);
    CHECK(r.exit_code == 0);
    CHECK(r.err.find("needs n >= 370") != std::string::npos);
}

TEST_CASE("missing input file exits 2 and names the path") {
    temp_dir dir;
    const auto r = run_cli("calibrate --input " + dir.file("nope.csv") + " --alpha 0.05 --out " +
                               dir.file("m.json"),
                           dir);
    CHECK(r.exit_code == 2);
    CHECK(r.err.find("nope.csv") != std::string::npos);
}

TEST_CASE("monitor exit codes distinguish quiet, alarm and error") {
    temp_dir dir;
    write_values(dir.file("calib.csv"), 99, 0.0, 0.1);
    REQUIRE(run_cli("calibrate --input " + dir.file("calib.csv") + " --alpha 0.1 --out " +
                        dir.file("m.json"),
                    dir)
                .exit_code == 0);

    write_values(dir.file("quiet.csv"), 5, 4.0, 0.1); // near the median of 0..9.8
    auto r = run_cli("monitor --archive " + dir.file("m.json") + " --input " +
                         dir.file("quiet.csv"),
                     dir);
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("ALARM") == std::string::npos);
    CHECK(r.out.find("0 alarm(s)") != std::string::npos);

    write_values(dir.file("loud.csv"), 3, 100.0, 1.0);
    r = run_cli("monitor --archive " + dir.file("m.json") + " --input " + dir.file("loud.csv") +
                    " --out " + dir.file("chart.tsv"),
                dir);
    CHECK(r.exit_code == 1);
    CHECK(r.out.find("ALARM index=0") != std::string::npos);
    CHECK(r.out.find("p=0.01") != std::string::npos); // 1/(99+1)
    const auto tsv = read_file(dir.file("chart.tsv"));
    CHECK(tsv.find("# kind=conformal_score") != std::string::npos);

    write_file(dir.file("broken.json"), "{\"format_version\": 1}");
    r = run_cli("monitor --archive " + dir.file("broken.json") + " --input " +
                    dir.file("quiet.csv"),
                dir);
    CHECK(r.exit_code == 2);
    CHECK(r.err.find("corrupt archive") != std::string::npos);
}

TEST_CASE("monitor rejects a stream that does not match the archive") {
    temp_dir dir;
    write_values(dir.file("calib.csv"), 50, 0.0, 1.0);
    REQUIRE(run_cli("calibrate --input " + dir.file("calib.csv") + " --alpha 0.1 --out " +
                        dir.file("m.json"),
                    dir)
                .exit_code == 0);
    write_file(dir.file("vectors.csv"), "v1,v2\n1,2\n3,4\n");
    const auto r = run_cli("monitor --archive " + dir.file("m.json") + " --input " +
                               dir.file("vectors.csv"),
                           dir);
    CHECK(r.exit_code == 2);
    CHECK(r.err.find("expects a `value` stream") != std::string::npos);
}

TEST_CASE("unparseable rows name their line number") {
    temp_dir dir;
    write_file(dir.file("bad.csv"), "value\n1.5\nbogus\n2.5\n");
    const auto r = run_cli("calibrate --input " + dir.file("bad.csv") + " --alpha 0.1 --out " +
                               dir.file("m.json"),
                           dir);
    CHECK(r.exit_code == 2);
    CHECK(r.err.find(":3:") != std::string::npos);
}

TEST_CASE("the CLI is a thin composition of library calls") {
    // the archive written by `calibrate` must equal the one the library
    // produces from the same fixture
    temp_dir dir;
    write_values(dir.file("calib.csv"), 37, -2.0, 0.75);
    REQUIRE(run_cli("calibrate --input " + dir.file("calib.csv") + " --alpha 0.08 --out " +
                        dir.file("m.json"),
                    dir)
                .exit_code == 0);
    const auto from_cli = load_archive(dir.file("m.json"));

    const auto ds = read_dataset(dir.file("calib.csv"));
    const auto scorer = fit_individual(ds.individuals);
    auto scores = kernels::score_stream(scorer, std::span<const observation>(ds.individuals));
    const auto direct =
        calibrate(std::move(scores), 0.08, std::string(scorer.id()), scorer.reference());
    CHECK(from_cli.model == direct);

    // monitor's alarm lines carry the library's p-values verbatim
    write_values(dir.file("stream.csv"), 1, 1000.0, 0.0);
    const auto r = run_cli("monitor --archive " + dir.file("m.json") + " --input " +
                               dir.file("stream.csv"),
                           dir);
    CHECK(r.exit_code == 1);
    const double p = conformal_p_value(direct, scorer.score(1000.0));
    CHECK(r.out.find("p=" + fmt_shortest(p)) != std::string::npos);
}

TEST_CASE("simulate writes identical reports for identical seeds") {
    temp_dir dir;
    const std::string base = "simulate --generator exponential --n-calib 200 --n-stream 300 "
                             "--onset 150 --shift mean --delta 2 --alpha 0.01 --reps 4 "
                             "--seed 77 --svg " +
                             dir.file("fig");
    auto r = run_cli(base + " --out " + dir.file("r1.tsv"), dir);
    CHECK(r.exit_code == 0);
    const auto svg1 = read_file(dir.file("fig-shewhart.svg"));
    r = run_cli(base + " --out " + dir.file("r2.tsv"), dir);
    CHECK(r.exit_code == 0);
    CHECK(read_file(dir.file("r1.tsv")) == read_file(dir.file("r2.tsv")));
    CHECK(read_file(dir.file("fig-shewhart.svg")) == svg1);

    const auto table = read_file(dir.file("r1.tsv"));
    CHECK(table.rfind("chart\tpre_shift_alarm_rate", 0) == 0);
    CHECK(testutil::count_occurrences(table, "\n") == 9); // header + 4 reps x 2 rows
}

TEST_CASE("chart renders SVG and enforces archive kinds") {
    temp_dir dir;
    write_values(dir.file("calib.csv"), 60, 0.0, 0.5);
    REQUIRE(run_cli("calibrate --input " + dir.file("calib.csv") + " --alpha 0.1 --out " +
                        dir.file("m.json"),
                    dir)
                .exit_code == 0);
    write_values(dir.file("stream.csv"), 20, 0.0, 2.0);

    auto r = run_cli("chart --kind pvalue --archive " + dir.file("m.json") + " --input " +
                         dir.file("stream.csv") + " --out " + dir.file("p.svg"),
                     dir);
    CHECK(r.exit_code == 0);
    const auto svg = read_file(dir.file("p.svg"));
    CHECK(testutil::count_occurrences(svg, "class=\"alpha-line\"") == 1);

    r = run_cli("chart --kind interval --archive " + dir.file("m.json") + " --input " +
                    dir.file("stream.csv") + " --out " + dir.file("i.svg"),
                dir);
    CHECK(r.exit_code == 2);
    CHECK(r.err.find("chart kind requires model-residual archive") != std::string::npos);

    r = run_cli("chart --kind shewhart --calibration " + dir.file("calib.csv") + " --input " +
                    dir.file("stream.csv") + " --out " + dir.file("s.svg"),
                dir);
    CHECK(r.exit_code == 0);
    CHECK(read_file(dir.file("s.svg")).find("class=\"limit-line\"") != std::string::npos);
}

TEST_CASE("spike chart runs end to end from a normalized-residual archive") {
    temp_dir dir;
    // mostly-quiet x,y file with a small, much noisier operating region that
    // the random split leaves mainly to the training half
    std::ofstream data(dir.file("pairs.csv"));
    data << "x,y\n";
    cspc::rng::engine g(5);
    for (int i = 0; i < 380; ++i) {
        const double x = 0.6 * cspc::rng::uniform01(g);
        data << x << "," << 2.0 + 3.0 * x + cspc::rng::normal(g, 0, 0.1) << "\n";
    }
    for (int i = 0; i < 20; ++i) {
        const double x = 0.8 + 0.2 * cspc::rng::uniform01(g);
        data << x << "," << 2.0 + 3.0 * x + cspc::rng::normal(g, 0, 3.0) << "\n";
    }
    data.close();

    auto r = run_cli("calibrate --input " + dir.file("pairs.csv") +
                         " --scorer normalized-residual --k 5 --alpha 0.1 --seed 3 --out " +
                         dir.file("m.json"),
                     dir);
    REQUIRE(r.exit_code == 0);

    std::ofstream stream(dir.file("probe.csv"));
    stream << "x,y\n";
    for (int i = 0; i < 10; ++i)
        stream << 0.8 + 0.01 * i << "," << 2.0 + 3.0 * (0.8 + 0.01 * i) << "\n";
    stream.close();

    r = run_cli("chart --kind spike --width-alpha 0.25 --archive " + dir.file("m.json") +
                    " --input " + dir.file("probe.csv") + " --out " + dir.file("spike.svg"),
                dir);
    CHECK(r.exit_code == 0);
    CHECK(read_file(dir.file("spike.svg")).find("class=\"spike\"") != std::string::npos);
}
