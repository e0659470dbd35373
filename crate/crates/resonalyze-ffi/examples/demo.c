/* Minimal C consumer of the resonalyze C ABI.
 *
 * Build (from the workspace root, after `cargo build --release`):
 *   cc crates/resonalyze-ffi/examples/demo.c \
 *      -Icrates/resonalyze-ffi/include \
 *      target/release/libresonalyze_ffi.a -lm -o demo
 */
#include <stdio.h>
#include <stdlib.h>

#include "resonalyze.h"

static void die(const char *where) {
    char *msg = rz_last_error_message();
    fprintf(stderr, "%s failed: %s\n", where, msg ? msg : "(no message)");
    rz_string_free(msg);
    exit(1);
}

int main(void) {
    RzForcing *forcing = NULL;
    RzClassification *cls = NULL;
    RzSolver *solver = NULL;

    const char *spec = "{\"builtin\": \"triangle\", \"params\": {\"period\": \"4\"}}";
    if (rz_forcing_from_json(spec, &forcing) != RZ_OK) die("forcing_from_json");

    if (rz_classify(forcing, "1/2*pi", 0.0, &cls) != RZ_OK) die("classify");
    printf("theorem case: %d\n", rz_classification_case(cls));

    char *report = rz_classification_json(cls);
    printf("report: %s\n", report);
    rz_string_free(report);

    double t1 = 0.0;
    if (rz_resonance_witness(forcing, cls, 10.0, &t1) != RZ_OK) die("witness");

    if (rz_solver_new(forcing, "1/2*pi", 0.0, 0.0, &solver) != RZ_OK) die("solver_new");
    double x = 0.0, xdot = 0.0;
    if (rz_solver_solve(solver, t1, &x, &xdot) != RZ_OK) die("solve");
    printf("x(t1 = %g) = %g (witness level 10)\n", t1, x);

    rz_solver_free(solver);
    rz_classification_free(cls);
    rz_forcing_free(forcing);
    return 0;
}
