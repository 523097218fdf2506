#include <doctest.h>

#include <cmath>

#include "bench500/tensor.hpp"

using namespace bench500;

TEST_CASE("alloc fills") {
    Tensor z = Tensor::zeros({DType::F32, {2, 2}});
    for (int64_t i = 0; i < 4; ++i) CHECK(z.at(i) == 0.0);

    Tensor c = Tensor::full({DType::F32, {3}}, 1.5);
    for (int64_t i = 0; i < 3; ++i) CHECK(c.at(i) == 1.5);
}

TEST_CASE("rng determinism and splitting") {
    Rng a(42, 0), b(42, 0), c(42, 1), d(7, 0);
    for (int i = 0; i < 100; ++i) {
        uint64_t va = a.next_u64();
        CHECK(va == b.next_u64());
        CHECK(va != c.next_u64());
        CHECK(va != d.next_u64());
    }

    // Repeated fills with the same (seed, stream) are bit-identical.
    Rng r1(123, 5), r2(123, 5);
    Tensor t1 = Tensor::uniform({DType::F64, {16}}, r1, -1, 1);
    Tensor t2 = Tensor::uniform({DType::F64, {16}}, r2, -1, 1);
    for (int64_t i = 0; i < 16; ++i) CHECK(t1.at(i) == t2.at(i));

    Rng n1(9, 0), n2(9, 0);
    Tensor g1 = Tensor::normal({DType::F32, {16}}, n1, 0, 1);
    Tensor g2 = Tensor::normal({DType::F32, {16}}, n2, 0, 1);
    for (int64_t i = 0; i < 16; ++i) CHECK(g1.at(i) == g2.at(i));
}

TEST_CASE("uniform golden values are frozen") {
    // Recorded once from the pinned generator, then frozen; guards against
    // platform or refactoring drift.
    const double golden[4] = {0.80065640213310052, 0.0031506962386166348, 0.7919626520241706,
                              0.42648635877472618};
    Rng r(42, 0);
    Tensor t = Tensor::uniform({DType::F64, {4}}, r, 0, 1);
    for (int i = 0; i < 4; ++i) CHECK(t.at(i) == golden[i]);
}

TEST_CASE("elementwise basics") {
    Tensor a = Tensor::from_values({DType::F32, {2}}, std::vector<double>{1, 2});
    Tensor b = Tensor::from_values({DType::F32, {2}}, std::vector<double>{3, 4});
    Tensor s = add(a, b);
    CHECK(s.at(0) == 4.0);
    CHECK(s.at(1) == 6.0);

    Tensor z = sub(a, a);
    CHECK(z.at(0) == 0.0);
    CHECK(z.at(1) == 0.0);

    Tensor m = mul(Tensor::from_values({DType::F64, {2}}, std::vector<double>{2, 3}),
                   Tensor::from_values({DType::F64, {2}}, std::vector<double>{4, 5}));
    CHECK(m.at(0) == 8.0);
    CHECK(m.at(1) == 15.0);

    CHECK_THROWS(add(a, Tensor::zeros({DType::F32, {3}})));
    CHECK_THROWS(div(a, Tensor::zeros({DType::F32, {2}})));

    Tensor sc = scale(a, -2.0);
    CHECK(sc.at(0) == -2.0);
    CHECK(sc.at(1) == -4.0);

    Tensor r = relu(Tensor::from_values({DType::F64, {3}}, std::vector<double>{-1, 0, 2}));
    CHECK(r.at(0) == 0.0);
    CHECK(r.at(1) == 0.0);
    CHECK(r.at(2) == 2.0);

    Tensor e = exp(Tensor::from_values({DType::F64, {2}}, std::vector<double>{0, 1}));
    CHECK(e.at(0) == 1.0);
    CHECK(e.at(1) == doctest::Approx(std::exp(1.0)).epsilon(1e-12));

    Tensor q = div(Tensor::from_values({DType::F64, {2}}, std::vector<double>{6, 9}),
                   Tensor::from_values({DType::F64, {2}}, std::vector<double>{2, 3}));
    CHECK(q.at(0) == 3.0);
    CHECK(q.at(1) == 3.0);
}

TEST_CASE("reduce_norm") {
    Tensor a = Tensor::from_values({DType::F64, {2}}, std::vector<double>{3, 0});
    Tensor b = Tensor::from_values({DType::F64, {2}}, std::vector<double>{0, 4});
    CHECK(reduce_norm(a, b, NormKind::L2) == doctest::Approx(5.0));
    CHECK(reduce_norm(a, a, NormKind::L1) == 0.0);
    CHECK(reduce_norm(a, a, NormKind::L2) == 0.0);
    CHECK(reduce_norm(a, a, NormKind::Linf) == 0.0);

    Tensor c = Tensor::from_values({DType::F64, {2}}, std::vector<double>{1, -2});
    Tensor zero = Tensor::zeros({DType::F64, {2}});
    CHECK(reduce_norm(c, zero, NormKind::Linf) == 2.0);
}

TEST_CASE("norm symmetry and ordering properties") {
    Rng rng(1000, 0);
    for (int trial = 0; trial < 50; ++trial) {
        Tensor a = Tensor::uniform({DType::F64, {13}}, rng, -5, 5);
        Tensor b = Tensor::uniform({DType::F64, {13}}, rng, -5, 5);
        double l1 = reduce_norm(a, b, NormKind::L1);
        double l2 = reduce_norm(a, b, NormKind::L2);
        double linf = reduce_norm(a, b, NormKind::Linf);
        CHECK(reduce_norm(b, a, NormKind::L1) == l1);
        CHECK(reduce_norm(b, a, NormKind::L2) == l2);
        CHECK(reduce_norm(b, a, NormKind::Linf) == linf);
        CHECK(linf <= l2 + 1e-12);
        CHECK(l2 <= l1 + 1e-12);
    }
}

namespace {

// Independent two-pass variance used as the oracle for variance_map.
double two_pass_variance(const std::vector<double>& xs) {
    double mean = 0;
    for (double x : xs) mean += x;
    mean /= double(xs.size());
    double ss = 0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return ss / double(xs.size() - 1);
}

}  // namespace

TEST_CASE("variance_map") {
    Tensor a = Tensor::full({DType::F64, {3}}, 2.5);
    std::vector<Tensor> same{a, a};
    Tensor v = variance_map(same);
    for (int64_t i = 0; i < 3; ++i) CHECK(v.at(i) == 0.0);

    std::vector<Tensor> pair{Tensor::from_values({DType::F64, {1}}, std::vector<double>{0}),
                             Tensor::from_values({DType::F64, {1}}, std::vector<double>{2})};
    CHECK(variance_map(pair).at(0) == 2.0);

    // 30 seeded-noise runs vs the two-pass oracle.
    Rng rng(77, 0);
    std::vector<Tensor> runs;
    for (int r = 0; r < 30; ++r) runs.push_back(Tensor::normal({DType::F64, {8}}, rng, 1.0, 0.5));
    Tensor vm = variance_map(runs);
    for (int64_t i = 0; i < 8; ++i) {
        std::vector<double> xs;
        for (const Tensor& t : runs) xs.push_back(t.at(i));
        CHECK(vm.at(i) == doctest::Approx(two_pass_variance(xs)).epsilon(1e-12));
    }

    CHECK_THROWS(variance_map(std::vector<Tensor>{a}));
}

TEST_CASE("bytes round trip") {
    Rng rng(5, 2);
    Tensor t = Tensor::uniform({DType::F32, {7}}, rng, -3, 3);
    Tensor back = Tensor::from_bytes(t.desc(), t.to_bytes());
    for (int64_t i = 0; i < 7; ++i) CHECK(back.at(i) == t.at(i));

    Tensor d = Tensor::uniform({DType::F64, {5}}, rng, -3, 3);
    Tensor dback = Tensor::from_bytes(d.desc(), d.to_bytes());
    for (int64_t i = 0; i < 5; ++i) CHECK(dback.at(i) == d.at(i));
}

TEST_CASE("desc validation") {
    CHECK_THROWS(TensorDesc{DType::F32, {2, -1}}.validate());
    CHECK_THROWS(TensorDesc{DType::F32, {1'000'000'000, 1'000'000'000, 1'000'000'000}}.validate());
    TensorDesc ok{DType::F32, {0, 28, 28}};
    ok.validate();  // zero extents tolerated structurally
    CHECK_THROWS(ok.validate_positive());
}
