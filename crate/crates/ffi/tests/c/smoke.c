#include <stdio.h>
#include <string.h>

#include "randcomp.h"

#define CHECK(cond)                                                      \
    do {                                                                 \
        if (!(cond)) {                                                   \
            fprintf(stderr, "line %d: %s (%s)\n", __LINE__, #cond,       \
                    rc_last_error_message());                            \
            return 1;                                                    \
        }                                                                \
    } while (0)

int main(void) {
    RcComposition *c = NULL;
    RcPattern *pat = NULL;
    RcMatch m;

    CHECK(rc_composition_parse("0211013", &c) == RC_OK);
    CHECK(rc_composition_len(c) == 7);
    CHECK(rc_composition_size(c) == 8);
    CHECK(rc_pattern_parse("o:[0,2,1,1]", &pat) == RC_OK);
    CHECK(rc_match(c, pat, false, &m) == RC_OK);
    CHECK(m.count == 1 && m.exists && !m.truncated);

    uint64_t small[2];
    CHECK(rc_composition_terms(c, small, 2) == RC_BUFFER_TOO_SMALL);
    CHECK(strlen(rc_last_error_message()) > 0);

    char *json = rc_composition_stats_json(c);
    CHECK(json != NULL && strstr(json, "\"components\":2") != NULL);
    rc_string_free(json);
    rc_pattern_free(pat);
    rc_composition_free(c);

    CHECK(rc_pattern_parse("o:[0,2", &pat) == RC_SYNTAX);
    CHECK(rc_composition_parse(NULL, &c) == RC_NULL_POINTER);

    RcRng *rng = rc_rng_new(7, 0);
    CHECK(rc_sample_uniform(10, 25, rng, &c) == RC_OK);
    CHECK(rc_composition_size(c) == 25);
    size_t grown = 99;
    CHECK(rc_evolve_step(c, rng, &grown) == RC_OK);
    CHECK(grown < 10 && rc_composition_size(c) == 26);
    rc_composition_free(c);
    rc_rng_free(rng);

    char *count = rc_count_compositions(4, 3);
    CHECK(count != NULL && strcmp(count, "20") == 0);
    rc_string_free(count);

    double value = 0.0;
    CHECK(rc_pattern_parse("u:[1,1]", &pat) == RC_OK);
    CHECK(rc_oracle_uniform(2, 2, pat, false, &value) == RC_OK);
    CHECK(value > 0.333 && value < 0.334);
    rc_pattern_free(pat);

    puts("ok");
    return 0;
}
