#include <catch2/catch_amalgamated.hpp>

#include "qf/hypcert.hpp"

#include <random>

using namespace qf;

namespace {

QuadraticSpace q8_instance(const FieldPtr& Q) {
    return tensor_diagonal({Q->one(), Q->one()}, QuadraticSpace::diagonal_int(Q, {1, 1, 1, 7}));
}

QuadraticSpace q12_instance(const FieldPtr& LQ) {
    auto q8 = tensor_diagonal({LQ->one(), LQ->one()},
                              QuadraticSpace::diagonal_int(LQ, {1, 1, 1, 7}));
    return orthogonal_sum(q8, scale(LQ->variable_element(),
                                    QuadraticSpace::diagonal_int(LQ, {1, 1, -7, -7})));
}

} // namespace

TEST_CASE("pfister norm extraction") {
    auto Q = Field::rationals();
    SECTION("pi = <<-1,-1,-7>>, gamma = 2 gives d = -1 and x = 1 + i") {
        auto pi = pfister_form_int(Q, {-1, -1, -7});
        auto ext = pfister_norm_extraction(pi, Q->integer(2));
        REQUIRE_FALSE(ext.is_square_case);
        REQUIRE(same_square_class(ext.entry.d, Q->integer(-1)));
        REQUIRE(quadratic_entry_norm(ext.entry) == Q->integer(2));
    }
    SECTION("gamma = 4 is a square") {
        auto pi = pfister_form_int(Q, {-1, -1, -7});
        auto ext = pfister_norm_extraction(pi, Q->integer(4));
        REQUIRE(ext.is_square_case);
        REQUIRE(ext.s == Q->integer(2));
    }
    SECTION("pi = <<-1,7>> = N_Q, gamma = 8") {
        auto nq = pfister_form_int(Q, {-1, 7});
        auto ext = pfister_norm_extraction(nq, Q->integer(8));
        REQUIRE_FALSE(ext.is_square_case);
        REQUIRE(same_square_class(ext.entry.d, Q->integer(-1)));
        REQUIRE(quadratic_entry_norm(ext.entry) == Q->integer(8));
        REQUIRE(hyperbolic_over_sqrt(nq, ext.entry.d));
    }
    SECTION("gamma outside G(pi) is rejected") {
        auto pi = pfister_form_int(Q, {-1, -1, -7});
        REQUIRE_THROWS_AS(pfister_norm_extraction(pi, Q->integer(-2)), input_error);
    }
}

TEST_CASE("biquadratic norm combination") {
    auto Q = Field::rationals();
    SECTION("the worked example: norms 2 from Q(i) and Q(sqrt 2)") {
        QuadraticEntry e1{Q->integer(-1), Q->one(), Q->one()};    // 1 + i
        QuadraticEntry e2{Q->integer(2), Q->integer(2), Q->one()}; // 2 + sqrt 2
        REQUIRE(quadratic_entry_norm(e1) == Q->integer(2));
        REQUIRE(quadratic_entry_norm(e2) == Q->integer(2));
        auto c = combine_norms(Q, e1, e2);
        REQUIRE_FALSE(c.square_case);
        BiquadraticEntry be;
        be.d1 = e1.d;
        be.d2 = e2.d;
        be.y = c.y;
        FieldElement nm = biquadratic_entry_norm(be, Q);
        REQUIRE(nm == Q->integer(18));
        // 2 * 18 = 36 = 6^2
        REQUIRE(Q->integer(2) * nm == Q->integer(36));
        REQUIRE(c.s * c.s * nm == Q->integer(2));
    }
    SECTION("degenerate branch: x1 = -x2 in K") {
        QuadraticEntry e1{Q->integer(-1), Q->integer(3), Q->zero()};
        QuadraticEntry e2{Q->integer(2), Q->integer(-3), Q->zero()};
        auto c = combine_norms(Q, e1, e2);
        REQUIRE(c.square_case);
        REQUIRE(c.s * c.s == Q->integer(9));
    }
    SECTION("equal extensions rejected") {
        QuadraticEntry e1{Q->integer(-1), Q->one(), Q->one()};
        QuadraticEntry e2{Q->integer(-4), Q->one(), Q->rational(Rational(1, 2))};
        REQUIRE_THROWS_AS(combine_norms(Q, e1, e2), input_error);
    }
    SECTION("the proof identity holds on 100 norm-matched pairs") {
        std::mt19937_64 rng(77);
        std::uniform_int_distribution<long long> small(-6, 6);
        auto E2 = Field::quad_ext_sqrt(Q, Q->integer(2));
        int done = 0;
        while (done < 100) {
            FieldElement x0 = Q->integer(small(rng)), x1 = Q->integer(small(rng));
            if (x1.is_zero()) continue;
            QuadraticEntry e1{Q->integer(-1), x0, x1};
            FieldElement alpha = quadratic_entry_norm(e1);
            if (alpha.is_zero()) continue;
            auto nm = norm_membership(E2, alpha);
            if (!nm.member || !nm.witness) continue;
            QuadraticEntry e2{Q->integer(2), nm.witness->quad().c[0], nm.witness->quad().c[1]};
            REQUIRE(quadratic_entry_norm(e2) == alpha);
            auto c = combine_norms(Q, e1, e2);
            if (!c.square_case) {
                BiquadraticEntry be;
                be.d1 = e1.d;
                be.d2 = e2.d;
                be.y = c.y;
                REQUIRE(c.s * c.s * biquadratic_entry_norm(be, Q) == alpha);
            }
            ++done;
        }
    }
}

TEST_CASE("dim-8 witt decomposition into <alpha> N_Q + <beta> pi") {
    auto Q = Field::rationals();
    SECTION("the E7 instance") {
        auto q8 = q8_instance(Q);
        auto wd = e7_witt_decompose(q8);
        REQUIRE(wd.alpha == Q->one());
        auto cls = quaternion_class(wd.nq_a, wd.nq_b);
        REQUIRE(cls.places == std::vector<Int>{2, 7});
        // the kernel is positive definite, so pi is the definite 3-fold form
        REQUIRE(isometric(wd.pi, pfister_form_int(Q, {-1, -1, -1})));
        // the identity q | -<alpha> N_Q | -<beta> pi hyperbolic is re-verified
        // inside; check the classified pieces
        REQUIRE(clifford_invariant(wd.nq) == clifford_invariant(q8));
        REQUIRE(clifford_invariant(wd.pi).trivial());
    }
    SECTION("split clifford invariant: trivial N_Q") {
        auto pi = pfister_form_int(Q, {-1, -1, -7});
        auto wd = e7_witt_decompose(pi);
        REQUIRE(is_hyperbolic(wd.nq));
        REQUIRE(isometric(wd.pi, pi));
        REQUIRE(wd.beta == Q->one());
    }
    SECTION("hyperbolic input: all-trivial output") {
        auto wd = e7_witt_decompose(hyperbolic_space(Q, 4));
        REQUIRE(is_hyperbolic(wd.nq));
        REQUIRE(is_hyperbolic(wd.pi));
    }
}

TEST_CASE("hyp certificates for the E7 instance") {
    auto Q = Field::rationals();
    auto q8 = q8_instance(Q);
    SECTION("gamma = 2: a single quadratic entry with d = -1, x = 1 + i") {
        auto cert = hyp_certificate(q8, Q->integer(2));
        REQUIRE(cert.quadratic.size() == 1);
        REQUIRE(cert.biquadratic.empty());
        REQUIRE(same_square_class(cert.quadratic[0].d, Q->integer(-1)));
        auto v = verify_certificate(q8, Q->integer(2), cert);
        CAPTURE(v.reason);
        REQUIRE(v.accept);
        // and it is a Hyp_2 certificate
        REQUIRE(verify_certificate(q8, Q->integer(2), cert, true).accept);
    }
    SECTION("gamma = 9: pure square") {
        auto cert = hyp_certificate(q8, Q->integer(9));
        REQUIRE(cert.quadratic.empty());
        REQUIRE(cert.biquadratic.empty());
        REQUIRE(cert.square == Q->integer(3));
        REQUIRE(verify_certificate(q8, Q->integer(9), cert).accept);
    }
    SECTION("gamma = 7: accepted certificate") {
        auto cert = hyp_certificate(q8, Q->integer(7));
        auto v = verify_certificate(q8, Q->integer(7), cert);
        CAPTURE(v.reason);
        REQUIRE(v.accept);
    }
    SECTION("sampled multipliers round trip and stay in G(q)") {
        auto gammas = sample_multipliers(q8, 12, 42);
        for (auto& g : gammas) {
            CAPTURE(g.str());
            REQUIRE(gq_membership(q8, g));
            auto cert = hyp_certificate(q8, g);
            auto v = verify_certificate(q8, g, cert);
            CAPTURE(v.reason);
            REQUIRE(v.accept);
        }
    }
    SECTION("non-members are rejected up front") {
        REQUIRE_THROWS_AS(hyp_certificate(q8, Q->integer(-2)), input_error);
    }
}

TEST_CASE("certificate JSON round trip") {
    auto Q = Field::rationals();
    auto q8 = q8_instance(Q);
    for (long long g : {2, 9, 7, 14}) {
        auto cert = hyp_certificate(q8, Q->integer(g));
        auto j = certificate_to_json(cert);
        REQUIRE(j.at("version") == "hypcert/1");
        auto back = certificate_from_json(Q, j);
        REQUIRE(verify_certificate(q8, Q->integer(g), back).accept);
    }
}

TEST_CASE("certificate tampering is caught") {
    auto Q = Field::rationals();
    auto q8 = q8_instance(Q);
    SECTION("norm off by a unit") {
        auto cert = hyp_certificate(q8, Q->integer(2));
        cert.quadratic[0].x0 += Q->one();
        auto v = verify_certificate(q8, Q->integer(2), cert);
        REQUIRE_FALSE(v.accept);
        REQUIRE(v.reason == "norm product mismatch");
    }
    SECTION("extension that fails to kill q") {
        auto cert = hyp_certificate(q8, Q->integer(2));
        // d = 7: q8 is definite over the real field Q(sqrt 7)
        cert.quadratic[0].d = Q->integer(7);
        auto v = verify_certificate(q8, Q->integer(2), cert);
        REQUIRE_FALSE(v.accept);
    }
    SECTION("biquadratic fault injection: each obligation is necessary") {
        // find a sampled gamma that produces a biquadratic entry
        std::optional<HypCertificate> bi;
        FieldElement used = Q->zero();
        for (long long g : {7, 14, 3, 6, 21, 35}) {
            if (!gq_membership(q8, Q->integer(g))) continue;
            auto cert = hyp_certificate(q8, Q->integer(g));
            if (!cert.biquadratic.empty()) {
                bi = cert;
                used = Q->integer(g);
                break;
            }
        }
        REQUIRE(bi.has_value());
        REQUIRE(verify_certificate(q8, used, *bi).accept);
        {
            // obligation 1: the Witt identity against q
            auto broken = *bi;
            broken.biquadratic[0].witt.nq_a = Q->one();
            broken.biquadratic[0].witt.nq_b = Q->one();
            auto v = verify_certificate(q8, used, broken);
            REQUIRE_FALSE(v.accept);
        }
        {
            // obligation 2: N_Q must die over K(sqrt d1); -7 fails at 2
            auto broken = *bi;
            broken.biquadratic[0].d1 = Q->integer(-7);
            auto v = verify_certificate(q8, used, broken);
            REQUIRE_FALSE(v.accept);
        }
        {
            // obligation 3: pi must die over K(sqrt d2); the real field
            // Q(sqrt 7) keeps it definite
            auto broken = *bi;
            broken.biquadratic[0].d2 = Q->integer(7);
            auto v = verify_certificate(q8, used, broken);
            REQUIRE_FALSE(v.accept);
            REQUIRE(v.reason.find("pi not hyperbolic") != std::string::npos);
        }
        // quadratic-only strictness flags the biquadratic entry
        REQUIRE_FALSE(verify_certificate(q8, used, *bi, true).accept);
    }
}

TEST_CASE("hyp certificates for the E8 instance") {
    auto LQ = Field::laurent_view(Field::rationals());
    auto q12 = q12_instance(LQ);
    SECTION("gamma = 2 lifts the E7 entry") {
        auto cert = hyp_certificate(q12, LQ->integer(2));
        REQUIRE_FALSE((cert.quadratic.empty() && cert.biquadratic.empty()));
        auto v = verify_certificate(q12, LQ->integer(2), cert);
        CAPTURE(v.reason);
        REQUIRE(v.accept);
        if (!cert.quadratic.empty())
            REQUIRE(hyperbolic_over_sqrt(q12, cert.quadratic[0].d));
    }
    SECTION("several separable multipliers") {
        for (long long g : {2, 5, 3, 8, 13}) {
            CAPTURE(g);
            REQUIRE(gq_membership(q12, LQ->integer(g)));
            auto cert = hyp_certificate(q12, LQ->integer(g));
            auto v = verify_certificate(q12, LQ->integer(g), cert);
            CAPTURE(v.reason);
            REQUIRE(v.accept);
        }
    }
}
