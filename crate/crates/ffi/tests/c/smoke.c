#include <stdio.h>
#include <string.h>

#include "codeco.h"

static const char *EXAMPLE[] = {"every", "man", "protects", "a", "house", "from",
                                "every", "enemy", "and", "does", "not", "destroy"};

int main(int argc, char **argv) {
    if (argc != 2) {
        return 2;
    }
    CodecoGrammar *g = NULL;
    if (codeco_grammar_load_file(argv[1], &g) != CODECO_STATUS_OK) {
        fprintf(stderr, "%s\n", codeco_last_error());
        return 1;
    }
    CodecoSession *s = NULL;
    if (codeco_session_new(g, NULL, &s) != CODECO_STATUS_OK) {
        return 1;
    }
    codeco_grammar_free(g);
    bool accepted = false;
    for (size_t i = 0; i < sizeof EXAMPLE / sizeof *EXAMPLE; i++) {
        if (codeco_session_feed(s, EXAMPLE[i], &accepted) != CODECO_STATUS_OK || !accepted) {
            return 1;
        }
    }
    codeco_session_feed(s, "the", &accepted);
    char *text = NULL;
    if (!accepted || codeco_session_next_tokens(s, &text) != CODECO_STATUS_OK) {
        return 1;
    }
    fputs(text, stdout);
    codeco_string_free(text);
    codeco_session_free(s);
    return 0;
}
