#!/usr/bin/env node
// SMT-LIB2 stdin/stdout front for the z3 WebAssembly build (npm package
// "z3-solver"). Presents the same line protocol as a native `z3 -in`:
// commands are read from stdin, responses are written to stdout as soon
// as each complete top-level s-expression has been evaluated.
//
// Usage: node z3shim.js [ignored args...]
// Extra arguments (e.g. "-in") are accepted for drop-in compatibility.

'use strict';

const path = require('path');

// Resolve z3-solver relative to this script so the shim works no matter
// what the caller's cwd is.
let initZ3;
try {
  ({ init: initZ3 } = require(require.resolve('z3-solver', { paths: [__dirname] })));
} catch (e) {
  process.stderr.write('z3shim: cannot load z3-solver; run `npm install` in ' + __dirname + '\n');
  process.exit(3);
}

// Splits a buffer into complete top-level SMT-LIB2 forms. Tracks string
// literals ("..." with "" escapes), |quoted symbols| and ; comments so
// parentheses inside them do not count.
function splitForms(buf) {
  const forms = [];
  let depth = 0, start = 0, i = 0;
  let inStr = false, inQsym = false, inComment = false;
  while (i < buf.length) {
    const c = buf[i];
    if (inComment) {
      if (c === '\n') inComment = false;
    } else if (inStr) {
      if (c === '"') {
        if (buf[i + 1] === '"') i++; else inStr = false;
      }
    } else if (inQsym) {
      if (c === '|') inQsym = false;
    } else if (c === ';') {
      inComment = true;
    } else if (c === '"') {
      inStr = true;
    } else if (c === '|') {
      inQsym = true;
    } else if (c === '(') {
      if (depth === 0) start = i;
      depth++;
    } else if (c === ')') {
      depth--;
      if (depth === 0) forms.push(buf.slice(start, i + 1));
      if (depth < 0) depth = 0; // stray ')': drop it
    }
    i++;
  }
  const rest = depth > 0 ? buf.slice(start) : '';
  return { forms, rest };
}

(async () => {
  const { Z3 } = await initZ3();
  const ctx = Z3.mk_context(Z3.mk_config());

  let pending = '';
  let queue = Promise.resolve();
  let closing = false;

  const evalForm = (form) => {
    queue = queue.then(async () => {
      if (/^\(\s*exit\s*\)$/.test(form)) {
        process.stdout.write('', () => process.exit(0));
        closing = true;
        return;
      }
      let out;
      try {
        out = await Z3.eval_smtlib2_string(ctx, form);
      } catch (e) {
        out = '(error "' + String(e && e.message ? e.message : e).replace(/"/g, "'") + '")\n';
      }
      if (out && out.length) process.stdout.write(out);
    });
  };

  process.stdin.setEncoding('utf8');
  process.stdin.on('data', (chunk) => {
    if (closing) return;
    pending += chunk;
    const { forms, rest } = splitForms(pending);
    pending = rest;
    for (const f of forms) evalForm(f);
  });
  process.stdin.on('end', () => {
    queue.then(() => process.exit(0));
  });
})().catch((e) => {
  process.stderr.write('z3shim: init failed: ' + e + '\n');
  process.exit(3);
});
