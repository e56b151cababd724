#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

namespace oracle {

namespace {

void normalize(double* x, std::size_t d) {
    double s = 0.0;
    for (std::size_t j = 0; j < d; ++j) s += x[j] * x[j];
    s = std::sqrt(s);
    for (std::size_t j = 0; j < d; ++j) x[j] /= s;
}

std::map<int, std::vector<std::size_t>> members(const std::vector<int>& labels) {
    std::map<int, std::vector<std::size_t>> m;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] >= 0) m[labels[i]].push_back(i);
    }
    return m;
}

std::vector<double> unit_sum(const Points& p, const std::vector<std::size_t>& rows, bool& ok) {
    std::vector<double> c(p.d, 0.0);
    for (auto i : rows) {
        for (std::size_t j = 0; j < p.d; ++j) c[j] += p.row(i)[j];
    }
    double s = 0.0;
    for (double x : c) s += x * x;
    ok = std::sqrt(s) > 1e-12;
    if (ok) normalize(c.data(), p.d);
    return c;
}

}  // namespace

Points random_sphere_points(std::uint64_t seed, std::size_t n, std::size_t d, std::size_t blobs, double spread) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<std::vector<double>> centres(std::max<std::size_t>(blobs, 1), std::vector<double>(d));
    for (auto& c : centres) {
        for (auto& x : c) x = gauss(gen);
        normalize(c.data(), d);
    }
    Points p{n, d, std::vector<double>(n * d)};
    for (std::size_t i = 0; i < n; ++i) {
        const auto& c = centres[i % centres.size()];
        for (std::size_t j = 0; j < d; ++j) p.v[i * d + j] = c[j] + spread * gauss(gen);
        normalize(p.v.data() + i * d, d);
    }
    return p;
}

revinv::EmbeddingMatrix to_matrix(const Points& p) {
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < p.n; ++i) ids.push_back("p" + std::to_string(i));
    return revinv::EmbeddingMatrix::normalized(ids, p.d, p.v, revinv::EmbeddingSource::tfidf());
}

double distance(const double* a, const double* b, std::size_t d) {
    double s = 0.0;
    for (std::size_t j = 0; j < d; ++j) s += a[j] * b[j];
    const double dist = 1.0 - s;
    if (dist < 1e-12) return 0.0;
    return std::min(dist, 2.0);
}

double silhouette(const Points& p, const std::vector<int>& labels) {
    const auto groups = members(labels);
    double total = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < p.n; ++i) {
        if (labels[i] < 0) continue;
        ++count;
        const auto& own = groups.at(labels[i]);
        if (own.size() < 2) continue;
        double a = 0.0;
        for (auto j : own) {
            if (j != i) a += distance(p.row(i), p.row(j), p.d);
        }
        a /= static_cast<double>(own.size() - 1);
        double b = std::numeric_limits<double>::infinity();
        for (const auto& [label, rows] : groups) {
            if (label == labels[i]) continue;
            double s = 0.0;
            for (auto j : rows) s += distance(p.row(i), p.row(j), p.d);
            b = std::min(b, s / static_cast<double>(rows.size()));
        }
        const double m = std::max(a, b);
        total += m > 0.0 ? (b - a) / m : 0.0;
    }
    return total / static_cast<double>(count);
}

double s_dbw(const Points& p, const std::vector<int>& labels) {
    const auto groups = members(labels);
    std::vector<std::vector<std::size_t>> cl;
    for (const auto& [_, rows] : groups) cl.push_back(rows);
    const std::size_t k = cl.size();

    std::vector<std::size_t> all;
    for (const auto& c : cl) all.insert(all.end(), c.begin(), c.end());
    bool ok = true;
    const auto g = unit_sum(p, all, ok);
    double scat_d = 0.0;
    for (auto i : all) scat_d += distance(p.row(i), g.data(), p.d);
    scat_d /= static_cast<double>(all.size());

    std::vector<std::vector<double>> v(k);
    std::vector<double> scat(k);
    for (std::size_t c = 0; c < k; ++c) {
        v[c] = unit_sum(p, cl[c], ok);
        double s = 0.0;
        for (auto i : cl[c]) s += distance(p.row(i), v[c].data(), p.d);
        scat[c] = s / static_cast<double>(cl[c].size());
    }

    double scat_term = 0.0;
    for (double s : scat) scat_term += s / scat_d;
    scat_term /= static_cast<double>(k);
    const double r = std::accumulate(scat.begin(), scat.end(), 0.0) / static_cast<double>(k);

    auto dens = [&](const std::vector<double>& point, std::size_t a, std::size_t b) {
        double n = 0.0;
        for (auto i : cl[a]) n += distance(p.row(i), point.data(), p.d) <= r ? 1.0 : 0.0;
        for (auto i : cl[b]) n += distance(p.row(i), point.data(), p.d) <= r ? 1.0 : 0.0;
        return n;
    };

    double dens_term = 0.0;
    for (std::size_t a = 0; a < k; ++a) {
        for (std::size_t b = 0; b < k; ++b) {
            if (a == b) continue;
            std::vector<double> mid(p.d);
            double norm = 0.0;
            for (std::size_t j = 0; j < p.d; ++j) {
                mid[j] = v[a][j] + v[b][j];
                norm += mid[j] * mid[j];
            }
            if (std::sqrt(norm) <= 1e-12) continue;
            normalize(mid.data(), p.d);
            const double denom = std::max(dens(v[a], a, b), dens(v[b], a, b));
            if (denom > 0.0) dens_term += dens(mid, a, b) / denom;
        }
    }
    dens_term /= static_cast<double>(k * (k - 1));
    return scat_term + dens_term;
}

std::vector<int> dbscan(const Points& p, double eps, std::size_t min_samples) {
    const std::size_t n = p.n;
    std::vector<std::vector<char>> near(n, std::vector<char>(n, 0));
    std::vector<bool> core(n, false);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t c = 0;
        for (std::size_t j = 0; j < n; ++j) {
            near[i][j] = distance(p.row(i), p.row(j), p.d) <= eps;
            c += near[i][j];
        }
        core[i] = c >= min_samples;
    }
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (core[i] && core[j] && near[i][j]) {
                auto a = find(i), b = find(j);
                if (a != b) parent[std::max(a, b)] = std::min(a, b);
            }
        }
    }
    // Component representative = its smallest core index.
    std::vector<long> comp(n, -1);
    for (std::size_t i = 0; i < n; ++i) {
        if (core[i]) comp[i] = static_cast<long>(find(i));
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (core[i]) continue;
        long best = -1;
        for (std::size_t j = 0; j < n; ++j) {
            if (core[j] && near[i][j] && (best < 0 || comp[j] < best)) best = comp[j];
        }
        comp[i] = best;
    }
    std::map<long, int> rename;
    std::vector<int> out(n, -1);
    for (std::size_t i = 0; i < n; ++i) {
        if (comp[i] < 0) continue;
        auto it = rename.emplace(comp[i], static_cast<int>(rename.size())).first;
        out[i] = it->second;
    }
    return out;
}

void jacobi_eigen(std::vector<double> a, std::size_t n, std::vector<double>& values,
                  std::vector<std::vector<double>>& vectors) {
    std::vector<double> v(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 1.0;
    auto A = [&](std::size_t i, std::size_t j) -> double& { return a[i * n + j]; };
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) off += A(i, j) * A(i, j);
        }
        if (off < 1e-30) break;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                if (std::abs(A(p, q)) < 1e-300) continue;
                const double theta = (A(q, q) - A(p, p)) / (2.0 * A(p, q));
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = A(k, p), akq = A(k, q);
                    A(k, p) = c * akp - s * akq;
                    A(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = A(p, k), aqk = A(q, k);
                    A(p, k) = c * apk - s * aqk;
                    A(q, k) = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v[k * n + p], vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto x, auto y) { return A(x, x) > A(y, y); });
    values.clear();
    vectors.clear();
    for (auto i : order) {
        values.push_back(A(i, i));
        std::vector<double> col(n);
        for (std::size_t k = 0; k < n; ++k) col[k] = v[k * n + i];
        vectors.push_back(col);
    }
}

Pca pca(const std::vector<double>& values, std::size_t n, std::size_t d) {
    std::vector<double> mean(d, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < d; ++j) mean[j] += values[i * d + j] / static_cast<double>(n);
    }
    std::vector<double> cov(d * d, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t a = 0; a < d; ++a) {
            for (std::size_t b = 0; b < d; ++b) {
                cov[a * d + b] += (values[i * d + a] - mean[a]) * (values[i * d + b] - mean[b]) /
                                  static_cast<double>(n - 1);
            }
        }
    }
    std::vector<double> ev;
    std::vector<std::vector<double>> vecs;
    jacobi_eigen(cov, d, ev, vecs);
    double total = 0.0;
    for (double e : ev) total += std::max(e, 0.0);

    Pca out;
    for (int c = 0; c < 2; ++c) {
        auto& w = vecs[static_cast<std::size_t>(c)];
        std::size_t pivot = 0;
        for (std::size_t j = 1; j < d; ++j) {
            if (std::abs(w[j]) > std::abs(w[pivot])) pivot = j;
        }
        if (w[pivot] < 0) {
            for (double& x : w) x = -x;
        }
        out.explained[c] = std::max(ev[static_cast<std::size_t>(c)], 0.0) / total;
        auto& target = c == 0 ? out.x : out.y;
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < d; ++j) s += (values[i * d + j] - mean[j]) * w[j];
            target.push_back(s);
        }
    }
    return out;
}

std::vector<std::vector<double>> tfidf(const std::vector<std::string>& docs, std::vector<std::string>& vocab) {
    std::vector<std::map<std::string, double>> counts(docs.size());
    std::set<std::string> words;
    for (std::size_t i = 0; i < docs.size(); ++i) {
        std::istringstream in(docs[i]);
        std::string w;
        while (in >> w) {
            counts[i][w] += 1.0;
            words.insert(w);
        }
    }
    vocab.assign(words.begin(), words.end());
    const double n = static_cast<double>(docs.size());
    std::vector<std::vector<double>> rows(docs.size(), std::vector<double>(vocab.size(), 0.0));
    for (std::size_t t = 0; t < vocab.size(); ++t) {
        double df = 0.0;
        for (const auto& c : counts) df += c.contains(vocab[t]) ? 1.0 : 0.0;
        const double idf = std::log((1.0 + n) / (1.0 + df)) + 1.0;
        for (std::size_t i = 0; i < docs.size(); ++i) {
            auto it = counts[i].find(vocab[t]);
            if (it != counts[i].end()) rows[i][t] = it->second * idf;
        }
    }
    for (auto& r : rows) normalize(r.data(), r.size());
    return rows;
}

bool same_partition(const std::vector<int>& a, const std::vector<int>& b) {
    if (a.size() != b.size()) return false;
    std::map<int, int> ab, ba;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if ((a[i] < 0) != (b[i] < 0)) return false;
        if (a[i] < 0) continue;
        auto x = ab.emplace(a[i], b[i]).first;
        auto y = ba.emplace(b[i], a[i]).first;
        if (x->second != b[i] || y->second != a[i]) return false;
    }
    return true;
}

}  // namespace oracle
