// Boots the real synthesis service once for the whole test run. The first
// start builds the canonical space (~10s); later runs reuse the cache dir.

import { spawn, ChildProcess } from 'node:child_process';
import { createServer } from 'node:net';
import { mkdtempSync, mkdirSync } from 'node:fs';
import { tmpdir } from 'node:os';
import { join } from 'node:path';
import type { GlobalSetupContext } from 'vitest/node';

function freePort(): Promise<number> {
  return new Promise((resolve, reject) => {
    const srv = createServer();
    srv.listen(0, '127.0.0.1', () => {
      const address = srv.address();
      if (address && typeof address === 'object') {
        const port = address.port;
        srv.close(() => resolve(port));
      } else {
        reject(new Error('no port'));
      }
    });
  });
}

async function waitForHealth(url: string, proc: ChildProcess): Promise<void> {
  for (let i = 0; i < 180; i++) {
    if (proc.exitCode !== null) {
      throw new Error(`service exited early with code ${proc.exitCode}`);
    }
    try {
      const resp = await fetch(`${url}/api/health`);
      if (resp.ok) return;
    } catch {
      // not up yet
    }
    await new Promise(r => setTimeout(r, 1000));
  }
  throw new Error('service did not become healthy in time');
}

export default async function setup({ provide }: GlobalSetupContext) {
  const port = await freePort();
  const cacheDir = join(tmpdir(), 'pragsynth-webui-cache');
  mkdirSync(cacheDir, { recursive: true });
  const logDir = mkdtempSync(join(tmpdir(), 'pragsynth-webui-logs-'));
  const proc = spawn('python3', [
    '-m', 'pragsynth.cli', 'serve', '--port', String(port), '--log-dir', logDir,
  ], {
    env: { ...process.env, PRAGSYNTH_CACHE_DIR: cacheDir },
    stdio: ['ignore', 'inherit', 'inherit'],
  });
  const url = `http://127.0.0.1:${port}`;
  await waitForHealth(url, proc);
  provide('serverUrl', url);
  return () => {
    proc.kill();
  };
}

declare module 'vitest' {
  export interface ProvidedContext {
    serverUrl: string;
  }
}
