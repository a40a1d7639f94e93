/* Minimal embedding example for the C interface.
 *
 * Build (from the workspace root, after `cargo build -p secretsniff-ffi`):
 *
 *   gcc -std=c11 -Wall -I crates/ffi/include crates/ffi/examples/smoke.c \
 *       -L target/debug -lsecretsniff_ffi -o smoke
 *   LD_LIBRARY_PATH=target/debug ./smoke <secrets.json>
 */
#include <stdio.h>
#include <string.h>

#include "secretsniff.h"

int main(int argc, char **argv) {
    if (argc < 2) {
        fprintf(stderr, "usage: %s <secrets.json>\n", argv[0]);
        return 2;
    }
    printf("secretsniff %s\n", sniff_version());

    SniffEngine *engine = NULL;
    SniffStatus st = sniff_engine_open(argv[1], NULL, &engine);
    if (st != SNIFF_STATUS_OK) {
        fprintf(stderr, "open failed (%d): %s\n", (int)st, sniff_last_error());
        return 2;
    }
    printf("patterns compiled: %zu\n", sniff_engine_pattern_count(engine));

    const char *text = "example buffer with no leaks\n";
    SniffFindings *findings = NULL;
    st = sniff_engine_scan_bytes(engine, (const uint8_t *)text, strlen(text), &findings);
    if (st != SNIFF_STATUS_OK) {
        fprintf(stderr, "scan failed (%d): %s\n", (int)st, sniff_last_error());
        sniff_engine_close(engine);
        return 2;
    }
    size_t n = sniff_findings_len(findings);
    printf("findings: %zu\n", n);
    for (size_t i = 0; i < n; i++) {
        printf("  %s at %s:%zu:%zu [%s] %s\n",
               sniff_finding_secret_id(findings, i),
               sniff_finding_path(findings, i),
               sniff_finding_line(findings, i),
               sniff_finding_column(findings, i),
               sniff_finding_correlation(findings, i),
               sniff_finding_excerpt(findings, i));
    }
    sniff_findings_free(findings);
    sniff_engine_close(engine);
    return n > 0 ? 1 : 0;
}
