#pragma once

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include "cspc/core.hpp"
#include "cspc/multivariate.hpp"
#include "cspc/rng.hpp"

namespace testutil {

using namespace cspc;

inline std::vector<observation> normal_observations(std::size_t n, double mu, double sigma,
                                                    rng::engine& g) {
    std::vector<observation> out(n);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = {static_cast<std::int64_t>(i), rng::normal(g, mu, sigma)};
    return out;
}

inline std::vector<observation> exponential_observations(std::size_t n, double rate,
                                                         rng::engine& g) {
    std::vector<observation> out(n);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = {static_cast<std::int64_t>(i), rng::exponential(g, rate)};
    return out;
}

/// Correlated Gaussian vectors: v = mean + L z with L the row-major lower
/// Cholesky factor of the desired covariance.
inline std::vector<process_vector> gaussian_vectors(std::size_t n,
                                                    const std::vector<double>& mean,
                                                    const std::vector<double>& chol_lower,
                                                    rng::engine& g) {
    const std::size_t d = mean.size();
    std::vector<process_vector> out(n);
    std::vector<double> z(d);
    for (std::size_t i = 0; i < n; ++i) {
        for (auto& zi : z)
            zi = rng::standard_normal(g);
        out[i].index = static_cast<std::int64_t>(i);
        out[i].components.resize(d);
        for (std::size_t r = 0; r < d; ++r) {
            double sum = mean[r];
            for (std::size_t c = 0; c <= r; ++c)
                sum += chol_lower[r * d + c] * z[c];
            out[i].components[r] = sum;
        }
    }
    return out;
}

/// Lower Cholesky factor of Sigma_ij = rho^|i-j| built directly from its
/// closed form (band structure): L[0][0]=1, L[i][i-?]... computed numerically
/// here by a plain Cholesky for simplicity.
inline std::vector<double> cholesky_of(std::vector<double> a, std::size_t d) {
    std::vector<double> l(d * d, 0.0);
    for (std::size_t r = 0; r < d; ++r)
        for (std::size_t c = 0; c <= r; ++c) {
            double sum = a[r * d + c];
            for (std::size_t t = 0; t < c; ++t)
                sum -= l[r * d + t] * l[c * d + t];
            if (r == c)
                l[r * d + r] = std::sqrt(sum);
            else
                l[r * d + c] = sum / l[c * d + c];
        }
    return l;
}

inline std::vector<double> ar1_covariance(std::size_t d, double rho) {
    std::vector<double> a(d * d);
    for (std::size_t r = 0; r < d; ++r)
        for (std::size_t c = 0; c < d; ++c)
            a[r * d + c] = std::pow(rho, std::abs(static_cast<double>(r) -
                                                   static_cast<double>(c)));
    return a;
}

/// Deliberately weak detector: absolute projection onto a fixed direction.
/// Exists to show conformal validity does not depend on detector quality.
class random_projection_detector final : public anomaly_detector {
  public:
    random_projection_detector(std::size_t dim, std::uint64_t seed) : w_(dim) {
        rng::engine g(seed);
        double norm2 = 0.0;
        for (auto& wi : w_) {
            wi = rng::standard_normal(g);
            norm2 += wi * wi;
        }
        for (auto& wi : w_)
            wi /= std::sqrt(norm2);
    }

    double score(std::span<const double> v) const override {
        if (v.size() != w_.size())
            throw std::invalid_argument("dimension mismatch");
        double dot = 0.0;
        for (std::size_t i = 0; i < w_.size(); ++i)
            dot += w_[i] * v[i];
        return std::abs(dot);
    }
    std::size_t dimension() const override { return w_.size(); }
    std::string id() const override { return "random_projection"; }

  private:
    std::vector<double> w_;
};

struct temp_dir {
    std::filesystem::path path;

    temp_dir() {
        auto base = std::filesystem::temp_directory_path();
        for (int i = 0; i < 1000; ++i) {
            auto candidate = base / ("cspc_test_" + std::to_string(std::rand()) + "_" +
                                     std::to_string(i));
            std::error_code ec;
            if (std::filesystem::create_directory(candidate, ec)) {
                path = candidate;
                return;
            }
        }
        throw std::runtime_error("cannot create temp dir");
    }
    ~temp_dir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

struct cli_result {
    int exit_code = -1;
    std::string out;
    std::string err;
};

#ifdef CSPC_CLI_PATH
inline cli_result run_cli(const std::string& args, const temp_dir& dir) {
    const std::string out_file = dir.file("cli_stdout.txt");
    const std::string err_file = dir.file("cli_stderr.txt");
    const std::string cmd = std::string(CSPC_CLI_PATH) + " " + args + " > " + out_file +
                            " 2> " + err_file;
    const int status = std::system(cmd.c_str());
    cli_result r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    const auto slurp = [](const std::string& p) {
        std::string text;
        if (FILE* f = std::fopen(p.c_str(), "rb")) {
            char buf[4096];
            std::size_t got;
            while ((got = std::fread(buf, 1, sizeof buf, f)) > 0)
                text.append(buf, got);
            std::fclose(f);
        }
        return text;
    };
    r.out = slurp(out_file);
    r.err = slurp(err_file);
    return r;
}
#endif

inline std::size_t count_occurrences(const std::string& text, const std::string& needle) {
    std::size_t count = 0, pos = 0;
    while ((pos = text.find(needle, pos)) != std::string::npos) {
        ++count;
        pos += needle.size();
    }
    return count;
}

} // namespace testutil
