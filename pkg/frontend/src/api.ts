// Thin typed client for the simulator service.  Every method maps 1:1 to
// one HTTP call; errors surface the server's diagnostic code.

import {
  EnabledPayload, ModelInfo, StatePayload, TransitionJson, Value,
} from './types.js'

export class ApiError extends Error {
  constructor(public code: string, message: string, public status: number) {
    super(message)
  }
}

async function body<T>(resp: Response): Promise<T> {
  if (!resp.ok) {
    let code = 'error'
    let message = `${resp.status}`
    try {
      const payload = await resp.json()
      code = payload.error ?? code
      message = payload.message ?? message
    } catch {
      // non-JSON error body: keep the status text
    }
    throw new ApiError(code, message, resp.status)
  }
  return resp.json() as Promise<T>
}

export class Api {
  constructor(public baseUrl: string) {}

  private url(path: string): string {
    return this.baseUrl.replace(/\/$/, '') + path
  }

  async model(): Promise<ModelInfo> {
    return body(await fetch(this.url('/model')))
  }

  async createSession(seed = 0): Promise<{ id: string; state: StatePayload }> {
    return body(await fetch(this.url('/sessions'), {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify({ seed }),
    }))
  }

  async state(sid: string): Promise<StatePayload> {
    return body(await fetch(this.url(`/sessions/${sid}/state`)))
  }

  async enabled(sid: string): Promise<EnabledPayload> {
    return body(await fetch(this.url(`/sessions/${sid}/enabled`)))
  }

  async fire(sid: string, transition: TransitionJson,
             choice?: Value[]): Promise<StatePayload> {
    return body(await fetch(this.url(`/sessions/${sid}/fire`), {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify(choice ? { transition, choice } : { transition }),
    }))
  }

  async undo(sid: string, k = 1): Promise<StatePayload> {
    return body(await fetch(this.url(`/sessions/${sid}/undo`), {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify({ k }),
    }))
  }

  async exportTrace(sid: string): Promise<string> {
    const resp = await fetch(this.url(`/sessions/${sid}/trace`))
    if (!resp.ok) throw new ApiError('error', `${resp.status}`, resp.status)
    return resp.text()
  }

  async importTrace(sid: string, text: string): Promise<StatePayload> {
    return body(await fetch(this.url(`/sessions/${sid}/trace`), {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify({ text }),
    }))
  }
}
