// Secondary acceptance: (a) a scripted 30-step click sequence on the train
// model exports a trace byte-identical to the CLI REPL given the same
// commands; (b) replaying an imported checker lasso around one full cycle
// returns to an equal digest.

import { mkdtempSync, readFileSync, writeFileSync } from 'node:fs'
import { tmpdir } from 'node:os'
import { join } from 'node:path'
import { afterAll, beforeAll, describe, expect, it } from 'vitest'

import { Api } from '../src/api.js'
import { SessionController } from '../src/controller.js'
import { LiveServer, modelPath, runCli, startServer } from './server_util.js'

let server: LiveServer

beforeAll(async () => {
  server = await startServer('train_abstract')
}, 30000)

afterAll(() => {
  server.stop()
})

describe('UI/CLI trace equivalence', () => {
  it('30 scripted clicks export byte-identically to the REPL', async () => {
    const controller = new SessionController(new Api(server.baseUrl))
    await controller.connect(0)

    // Deterministic click sequence: always the first offered transition.
    const fired: string[] = []
    for (let k = 0; k < 30; k++) {
      const label = controller.enabledLabels()[0].split('  [')[0]
      const ok = await controller.fireByLabel(label)
      expect(ok).toBe(true)
      fired.push(label)
    }
    const uiTrace = await controller.exportTrace()
    expect(uiTrace.trim().split('\n').length).toBe(31)

    const dir = mkdtempSync(join(tmpdir(), 'ttmc-ui-'))
    const tracePath = join(dir, 'cli-trace.jsonl')
    const scriptPath = join(dir, 'script.txt')
    writeFileSync(
      scriptPath,
      fired.map(label => `fire ${label}`).join('\n') +
        `\nexport ${tracePath}\n`,
    )
    const run = runCli([
      'simulate', modelPath('train_abstract'), '--seed', '0',
      '--script', scriptPath,
    ])
    expect(run.status).toBe(0)
    const cliTrace = readFileSync(tracePath, 'utf-8')
    expect(uiTrace).toBe(cliTrace)
  }, 60000)
})

describe('lasso replay', () => {
  it('stepping one full cycle returns to an equal digest', async () => {
    const dir = mkdtempSync(join(tmpdir(), 'ttmc-lasso-'))
    const lassoPath = join(dir, 'lasso.jsonl')
    const run = runCli([
      'check', modelPath('train_abstract_demonic'), '--prop', 'liveness',
      '--trace-json', lassoPath,
    ])
    expect(run.status).toBe(1) // liveness fails; the lasso trace is written

    const lassoServer = await startServer('train_abstract_demonic')
    try {
      const controller = new SessionController(new Api(lassoServer.baseUrl))
      await controller.connect(0)
      const text = readFileSync(lassoPath, 'utf-8')
      const loaded = await controller.loadTrace(text)
      expect(loaded).toBe(true)

      const replay = controller.view().replay!
      expect(replay.cycleStart).not.toBeNull()
      expect(replay.position).toBe(replay.cycleStart)
      const cycleLength = replay.total - replay.cycleStart!
      expect(cycleLength).toBeGreaterThan(0)
      const digestAtCycleStart = controller.view().digest

      for (let k = 0; k < cycleLength; k++) {
        await controller.replayNext()
        expect(controller.view().error).toBeNull()
      }
      expect(controller.view().digest).toBe(digestAtCycleStart)

      // Around the cycle once more (replayNext wraps past the end).
      for (let k = 0; k < cycleLength; k++) {
        await controller.replayNext()
      }
      expect(controller.view().digest).toBe(digestAtCycleStart)

      // Replay never mutates beyond the imported trace.
      expect(controller.view().replay!.total).toBe(replay.total)
      expect(controller.view().enabled.every(e => !e.clickable)).toBe(true)
    } finally {
      lassoServer.stop()
    }
  }, 120000)
})
